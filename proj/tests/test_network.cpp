#include <doctest.h>

#include <cstdio>

#include "kanpnp/network.hpp"
#include "kanpnp/rng.hpp"
#include "oracles.hpp"

using namespace kanpnp;

namespace {

BasisSpec default_spline() { return BasisSpec{BasisKind::BSpline, 5, 3, -1.0, 1.0}; }

MatR<double> random_batch(int n, int d, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    MatR<double> m(n, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

}  // namespace

TEST_CASE("init_network produces the documented shapes and is seeded") {
    const auto net = init_network<double>({2, 128, 32, 16, 3}, default_spline(), 0);
    REQUIRE(net.layer_count() == 4);
    CHECK(net.layers[0].coeff.rows() == 128);
    CHECK(net.layers[0].coeff.cols() == 2 * 8);  // G + k = 8 basis functions
    CHECK(net.layers[0].base_weight.rows() == 128);
    CHECK(net.layers[0].base_weight.cols() == 2);

    const auto again = init_network<double>({2, 128, 32, 16, 3}, default_spline(), 0);
    for (int l = 0; l < net.layer_count(); ++l) {
        CHECK(net.layers[l].coeff == again.layers[l].coeff);
        CHECK(net.layers[l].base_weight == again.layers[l].base_weight);
    }

    const auto other = init_network<double>({2, 128, 32, 16, 3}, default_spline(), 1);
    CHECK(net.layers[0].coeff != other.layers[0].coeff);
}

TEST_CASE("init_network rejects bad dims") {
    CHECK_THROWS_AS(init_network<double>({}, default_spline(), 0), std::invalid_argument);
    CHECK_THROWS_AS(init_network<double>({2}, default_spline(), 0), std::invalid_argument);
    CHECK_THROWS_AS(init_network<double>({2, 0, 3}, default_spline(), 0), std::invalid_argument);
}

TEST_CASE("forward with all-zero parameters returns zero") {
    auto net = init_network<double>({3, 4, 2}, default_spline(), 0);
    for (auto& layer : net.layers) {
        layer.coeff.setZero();
        layer.base_weight.setZero();
    }
    const auto [out, cache] = forward(net, random_batch(5, 3, 9));
    CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("all-ones spline coefficients reproduce the partition of unity") {
    auto net = init_network<double>({1, 1}, default_spline(), 0);
    net.layers[0].coeff.setOnes();
    net.layers[0].base_weight.setZero();
    const auto [out, cache] = forward(net, random_batch(20, 1, 5));
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        CHECK(out(i, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forward matches the term-by-term oracle") {
    for (BasisKind kind : {BasisKind::BSpline, BasisKind::Fourier}) {
        BasisSpec basis{kind, 5, 3, -1.0, 1.0};
        const auto net = init_network<double>({2, 5, 3}, basis, 21);
        const auto batch = random_batch(7, 2, 13, -1.5, 1.5);
        const auto [out, cache] = forward(net, batch);
        for (Eigen::Index s = 0; s < batch.rows(); ++s) {
            const auto want = oracle::network_eval(net, {batch(s, 0), batch(s, 1)});
            for (int j = 0; j < 3; ++j)
                CHECK(out(s, j) == doctest::Approx(want[j]).epsilon(1e-10));
        }
    }
}

TEST_CASE("forward rejects shape mismatches and non-finite input") {
    const auto net = init_network<double>({2, 3}, default_spline(), 0);
    CHECK_THROWS_AS(forward(net, random_batch(4, 3, 1)), std::invalid_argument);
    MatR<double> bad = random_batch(2, 2, 1);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(forward(net, bad), std::invalid_argument);
}

TEST_CASE("forward stays finite for extreme finite inputs") {
    const auto net = init_network<double>({2, 8, 3}, default_spline(), 3);
    MatR<double> batch(3, 2);
    batch << 1e12, -1e12, 500.0, -0.1, 0.0, 1e300;
    const auto [out, cache] = forward(net, batch);
    CHECK(out.allFinite());
}

TEST_CASE("backward gradients match central finite differences") {
    for (BasisKind kind : {BasisKind::BSpline, BasisKind::Fourier}) {
        BasisSpec basis{kind, 5, 3, -1.0, 1.0};
        auto net = init_network<double>({2, 4, 3}, basis, 17);
        const auto batch = random_batch(5, 2, 23, -0.95, 0.95);
        const auto out_grad = random_batch(5, 3, 29);

        const auto [out, cache] = forward(net, batch);
        const auto grads = backward(net, cache, out_grad);

        auto loss = [&](const KanNetworkT<double>& n) {
            return (forward(n, batch).first.cwiseProduct(out_grad)).sum();
        };
        const double h = 1e-6;
        for (int l = 0; l < net.layer_count(); ++l) {
            for (auto [param, grad] :
                 {std::pair{&net.layers[l].coeff, &grads.coeff_grad[l]},
                  std::pair{&net.layers[l].base_weight, &grads.base_grad[l]}}) {
                for (Eigen::Index idx = 0; idx < param->size(); ++idx) {
                    const double orig = param->data()[idx];
                    param->data()[idx] = orig + h;
                    const double up = loss(net);
                    param->data()[idx] = orig - h;
                    const double dn = loss(net);
                    param->data()[idx] = orig;
                    const double fd = (up - dn) / (2 * h);
                    const double an = grad->data()[idx];
                    const double scale = std::max({std::abs(fd), std::abs(an), 1e-6});
                    CHECK(std::abs(fd - an) / scale < 1e-4);
                }
            }
        }

        // input gradients against finite differences as well
        for (Eigen::Index s = 0; s < 2; ++s) {
            for (int i = 0; i < 2; ++i) {
                MatR<double> up = batch, dn = batch;
                up(s, i) += h;
                dn(s, i) -= h;
                const double fd = ((forward(net, up).first - forward(net, dn).first)
                                       .cwiseProduct(out_grad))
                                      .sum() /
                                  (2 * h);
                const double an = grads.input_grad(s, i);
                const double scale = std::max({std::abs(fd), std::abs(an), 1e-6});
                CHECK(std::abs(fd - an) / scale < 1e-4);
            }
        }
    }
}

TEST_CASE("backward is linear in out_grad") {
    const auto net = init_network<double>({2, 4, 3}, default_spline(), 31);
    const auto batch = random_batch(4, 2, 37);
    const auto out_grad = random_batch(4, 3, 41);
    const auto [out, cache] = forward(net, batch);

    const auto g1 = backward(net, cache, out_grad);
    const auto g2 = backward(net, cache, MatR<double>(2.0 * out_grad));
    for (int l = 0; l < net.layer_count(); ++l) {
        CHECK((g2.coeff_grad[l] - 2.0 * g1.coeff_grad[l]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((g2.base_grad[l] - 2.0 * g1.base_grad[l]).cwiseAbs().maxCoeff() == 0.0);
    }

    const auto gz = backward(net, cache, MatR<double>(MatR<double>::Zero(4, 3)));
    for (int l = 0; l < net.layer_count(); ++l) {
        CHECK(gz.coeff_grad[l].cwiseAbs().maxCoeff() == 0.0);
        CHECK(gz.base_grad[l].cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(gz.input_grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward rejects a mismatched cache") {
    const auto net = init_network<double>({2, 4, 3}, default_spline(), 1);
    const auto other = init_network<double>({2, 3}, default_spline(), 1);
    const auto batch = random_batch(4, 2, 3);
    auto [out, cache] = forward(net, batch);
    CHECK_THROWS_AS(backward(other, cache, out), std::invalid_argument);
    CHECK_THROWS_AS(backward(net, cache, random_batch(3, 3, 5)), std::invalid_argument);
}

TEST_CASE("network serialization round trips bit-exactly") {
    const auto net = init_network<double>({2, 6, 3}, default_spline(), 99);
    const std::string path = "test_net_roundtrip.bin";
    save_network(net, path);
    const auto back = load_network(path);
    REQUIRE(back.dims == net.dims);
    CHECK(back.seed == net.seed);
    for (int l = 0; l < net.layer_count(); ++l) {
        CHECK(back.layers[l].coeff == net.layers[l].coeff);
        CHECK(back.layers[l].base_weight == net.layers[l].base_weight);
        CHECK(back.layers[l].basis.kind == net.layers[l].basis.kind);
    }
    CHECK_THROWS_AS(load_network_f(path), std::runtime_error);  // width mismatch
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_network("does_not_exist.bin"), std::runtime_error);
}

TEST_CASE("float instantiation agrees with double to single precision") {
    BasisSpec basis = default_spline();
    const auto netd = init_network<double>({2, 8, 3}, basis, 5);
    const auto netf = init_network<float>({2, 8, 3}, basis, 5);
    const auto batch = random_batch(6, 2, 77);
    const MatR<float> batchf = batch.cast<float>();
    const auto outd = forward(netd, batch).first;
    const auto outf = forward(netf, batchf).first;
    for (Eigen::Index i = 0; i < outd.size(); ++i)
        CHECK(outd.data()[i] == doctest::Approx(static_cast<double>(outf.data()[i]))
                                    .epsilon(1e-4)
                                    .scale(1.0));
}
