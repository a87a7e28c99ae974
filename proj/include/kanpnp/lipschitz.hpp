// Certified Lipschitz bounds for KAN networks, plus a sampled lower
// estimate. The bound is a product over layers, each layer bounded through
// the matrix of per-edge derivative suprema.
#pragma once

#include <cstdint>

#include "kanpnp/network.hpp"

namespace kanpnp {

// Certified sup of |phi'| on the basis domain for one edge: derivative-spline
// coefficient maximum (B-spline) or weighted harmonic sum (Fourier), plus the
// silu base branch.
double edge_derivative_bound(const BasisSpec& basis, const double* coeff, double base_weight);

// Spectral norm of the nonnegative edge-bound matrix; a valid l2 Lipschitz
// bound for the layer map.
double layer_lipschitz_bound(const KanLayerT<double>& layer);
double layer_lipschitz_bound(const KanLayerT<float>& layer);

// Max-row-sum variant of the layer bound (valid in the sup norm).
double layer_lipschitz_bound_maxrow(const KanLayerT<double>& layer);
double layer_lipschitz_bound_maxrow(const KanLayerT<float>& layer);

// Product of the per-layer spectral bounds; certifies
// ||H(x) - H(y)||_2 <= L_H ||x - y||_2 for all x, y.
double lipschitz_upper_bound(const KanNetworkT<double>& net);
double lipschitz_upper_bound(const KanNetworkT<float>& net);

// Product of max-row-sum layer bounds (the sup-norm analogue; reported as a
// diagnostic next to the l2 bound).
double lipschitz_upper_bound_maxrow(const KanNetworkT<double>& net);
double lipschitz_upper_bound_maxrow(const KanNetworkT<float>& net);

// Max of ||H(x)-H(y)||_2 / ||x-y||_2 over seeded random pairs in the domain.
double lipschitz_empirical(const KanNetworkT<double>& net, int n_pairs, std::uint64_t seed);
double lipschitz_empirical(const KanNetworkT<float>& net, int n_pairs, std::uint64_t seed);

}  // namespace kanpnp
