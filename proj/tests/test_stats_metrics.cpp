#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fwmix/common.hpp"
#include "fwmix/dataset.hpp"
#include "fwmix/metrics.hpp"
#include "fwmix/models.hpp"
#include "fwmix/stats.hpp"
#include "test_util.hpp"

using namespace fwmix;

TEST_CASE("student t two-sided tail matches reference values") {
  CHECK(student_t_two_sided_p(2.0, 9) == doctest::Approx(0.07655282377070094).epsilon(1e-10));
  CHECK(student_t_two_sided_p(0.5, 4) == doctest::Approx(0.6433299631818633).epsilon(1e-10));
  CHECK(student_t_two_sided_p(12.0, 9) == doctest::Approx(7.699886222985645e-07).epsilon(1e-8));
  CHECK(student_t_two_sided_p(0.0, 7) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(student_t_two_sided_p(-2.0, 9) == student_t_two_sided_p(2.0, 9));
}

TEST_CASE("regularized incomplete beta endpoints and symmetry") {
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(a, b) = 1 - I_{1-x}(b, a).
  const double lhs = regularized_incomplete_beta(2.5, 4.0, 0.3);
  const double rhs = 1.0 - regularized_incomplete_beta(4.0, 2.5, 0.7);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  // I_x(1, 1) is the identity.
  CHECK(regularized_incomplete_beta(1.0, 1.0, 0.42) == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("kolmogorov tail matches reference values") {
  CHECK(kolmogorov_q(0.4) == doctest::Approx(0.9971923267772983).epsilon(1e-9));
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-9));
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-9));
  CHECK(kolmogorov_q(1.5) == doctest::Approx(0.022217962616525127).epsilon(1e-9));
  CHECK(kolmogorov_q(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-7));
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(10.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("error metrics on a tiny fixture") {
  const std::vector<double> truth{2.0, 4.0};
  const std::vector<double> pred{1.0, 2.0};
  CHECK(mse(truth, pred) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(mae(truth, pred) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(rmse(truth, pred) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));
  const std::vector<double> shorter{1.0};
  const std::vector<double> empty;
  CHECK_THROWS_AS(mse(truth, shorter), std::invalid_argument);
  CHECK_THROWS_AS(mse(empty, empty), std::invalid_argument);
}

TEST_CASE("delta_bias is the percent drop from regional to mixed") {
  const BiasReduction r = delta_bias(0.2, 0.1);
  CHECK(r.mse_regional == 0.2);
  CHECK(r.mse_mixed == 0.1);
  CHECK(r.delta_percent == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(delta_bias(0.1, 0.2).delta_percent == doctest::Approx(-100.0).epsilon(1e-12));
  CHECK_THROWS_AS(delta_bias(0.0, 0.1), std::invalid_argument);
}

TEST_CASE("paired t-test matches reference values") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> zero{0.0, 0.0, 0.0, 0.0};
  const TTestResult r = paired_t_test(a, zero);
  CHECK(r.df == 3);
  CHECK(r.t == doctest::Approx(3.872983346207417).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(0.030466291662170977).epsilon(1e-10));

  // Sign follows the first argument.
  CHECK(paired_t_test(zero, a).t == doctest::Approx(-3.872983346207417).epsilon(1e-12));

  const std::vector<double> x{0.181, 0.176, 0.190, 0.168, 0.179,
                              0.185, 0.172, 0.188, 0.174, 0.183};
  const std::vector<double> y{0.205, 0.198, 0.211, 0.189, 0.201,
                              0.214, 0.195, 0.209, 0.197, 0.206};
  const TTestResult big = paired_t_test(x, y);
  CHECK(big.df == 9);
  CHECK(big.t == doctest::Approx(-30.450739633124225).epsilon(1e-9));
  CHECK(big.p == doctest::Approx(2.1743411995692691e-10).epsilon(1e-6));
}

TEST_CASE("paired t-test zero-variance conventions") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const TTestResult same = paired_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  const std::vector<double> shifted{2.0, 3.0, 4.0};
  const TTestResult off = paired_t_test(shifted, a);
  CHECK(std::isinf(off.t));
  CHECK(off.t > 0.0);
  CHECK(off.p == 0.0);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(paired_t_test(one, one), std::invalid_argument);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(paired_t_test(a, two), std::invalid_argument);
}

TEST_CASE("residual means group by region tag") {
  // A depth-0 tree predicts the training mean, so residuals are exactly
  // the per-row deviations from that mean.
  Dataset train({"x"});
  const std::vector<double> x0{0.0};
  train.append(x0, 10.0);
  Hyperparams hp = Hyperparams::of(ModelKind::dt);
  hp.dt.max_depth = 0;
  const FittedModel model = train_model(train, hp);

  Dataset eval({"x"});
  eval.append(x0, 11.0, "a");
  eval.append(x0, 13.0, "a");
  eval.append(x0, 10.0, "b");
  const std::map<std::string, double> means = residual_region_means(model, eval);
  CHECK(means.size() == 2);
  CHECK(means.at("a") == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(means.at("b") == doctest::Approx(0.0).epsilon(1e-15));

  // Pooling over several datasets weights by row count.
  Dataset more({"x"});
  more.append(x0, 16.0, "a");
  const auto pooled = residual_region_means(model, std::vector<Dataset>{eval, more});
  CHECK(pooled.at("a") == doctest::Approx(10.0 / 3.0).epsilon(1e-12));

  Dataset untagged({"x"});
  untagged.append(x0, 1.0);
  CHECK_THROWS_AS(residual_region_means(model, untagged), std::invalid_argument);
}
