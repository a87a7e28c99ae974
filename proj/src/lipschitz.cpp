#include "kanpnp/lipschitz.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace kanpnp {
namespace {

template <typename T>
Eigen::MatrixXd edge_bound_matrix(const KanLayerT<T>& layer) {
    const int nb = layer.n_basis();
    Eigen::MatrixXd M(layer.out_dim, layer.in_dim);
    std::vector<double> coeff(nb);
    for (int j = 0; j < layer.out_dim; ++j) {
        for (int i = 0; i < layer.in_dim; ++i) {
            for (int m = 0; m < nb; ++m)
                coeff[m] = static_cast<double>(layer.coeff(j, i * nb + m));
            M(j, i) = edge_derivative_bound(layer.basis, coeff.data(),
                                            static_cast<double>(layer.base_weight(j, i)));
        }
    }
    return M;
}

template <typename T>
double layer_bound_impl(const KanLayerT<T>& layer) {
    const Eigen::MatrixXd M = edge_bound_matrix(layer);
    if (M.size() == 1) return M(0, 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(0);
}

template <typename T>
double layer_bound_maxrow_impl(const KanLayerT<T>& layer) {
    return edge_bound_matrix(layer).rowwise().sum().maxCoeff();
}

template <typename T>
double upper_bound_impl(const KanNetworkT<T>& net) {
    double prod = 1.0;
    for (const auto& layer : net.layers) prod *= layer_bound_impl(layer);
    return prod;
}

template <typename T>
double upper_bound_maxrow_impl(const KanNetworkT<T>& net) {
    double prod = 1.0;
    for (const auto& layer : net.layers) prod *= layer_bound_maxrow_impl(layer);
    return prod;
}

template <typename T>
double empirical_impl(const KanNetworkT<T>& net, int n_pairs, std::uint64_t seed) {
    if (n_pairs < 1) throw std::invalid_argument("lipschitz_empirical: n_pairs must be >= 1");
    const auto& basis = net.layers.front().basis;
    const int n = net.in_dim();
    Rng rng(seed);
    MatR<T> xs(2 * n_pairs, n);
    for (Eigen::Index r = 0; r < xs.rows(); ++r)
        for (int c = 0; c < n; ++c)
            xs(r, c) = static_cast<T>(rng.uniform(basis.lo, basis.hi));
    const MatR<T> ys = forward(net, xs).first;
    double best = 0.0;
    for (int p = 0; p < n_pairs; ++p) {
        const double dx = (xs.row(2 * p) - xs.row(2 * p + 1)).template cast<double>().norm();
        if (dx == 0.0) continue;
        const double dy = (ys.row(2 * p) - ys.row(2 * p + 1)).template cast<double>().norm();
        best = std::max(best, dy / dx);
    }
    return best;
}

}  // namespace

double edge_derivative_bound(const BasisSpec& basis, const double* coeff, double base_weight) {
    double spline = 0.0;
    if (basis.kind == BasisKind::BSpline) {
        // derivative spline coefficients k*(c_m - c_{m-1}) / (t_{m+k} - t_m);
        // on the uniform grid the knot span is k*h
        const double inv_h = 1.0 / basis.spacing();
        for (int m = 1; m < basis.basis_count(); ++m)
            spline = std::max(spline, std::abs(coeff[m] - coeff[m - 1]) * inv_h);
    } else {
        const double base = 2.0 * M_PI / (basis.hi - basis.lo);
        for (int m = 1; m <= basis.order; ++m)
            spline += m * base * (std::abs(coeff[2 * m - 1]) + std::abs(coeff[2 * m]));
    }
    return spline + std::abs(base_weight) * kSiluDerivBound;
}

double layer_lipschitz_bound(const KanLayerT<double>& layer) { return layer_bound_impl(layer); }
double layer_lipschitz_bound(const KanLayerT<float>& layer) { return layer_bound_impl(layer); }
double layer_lipschitz_bound_maxrow(const KanLayerT<double>& layer) {
    return layer_bound_maxrow_impl(layer);
}
double layer_lipschitz_bound_maxrow(const KanLayerT<float>& layer) {
    return layer_bound_maxrow_impl(layer);
}
double lipschitz_upper_bound(const KanNetworkT<double>& net) { return upper_bound_impl(net); }
double lipschitz_upper_bound(const KanNetworkT<float>& net) { return upper_bound_impl(net); }
double lipschitz_upper_bound_maxrow(const KanNetworkT<double>& net) {
    return upper_bound_maxrow_impl(net);
}
double lipschitz_upper_bound_maxrow(const KanNetworkT<float>& net) {
    return upper_bound_maxrow_impl(net);
}
double lipschitz_empirical(const KanNetworkT<double>& net, int n_pairs, std::uint64_t seed) {
    return empirical_impl(net, n_pairs, seed);
}
double lipschitz_empirical(const KanNetworkT<float>& net, int n_pairs, std::uint64_t seed) {
    return empirical_impl(net, n_pairs, seed);
}

}  // namespace kanpnp
