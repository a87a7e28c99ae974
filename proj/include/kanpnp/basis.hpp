// Univariate basis families for KAN edges: uniform B-splines (Cox-de Boor)
// and a low-harmonic Fourier set. Inputs are clamped to the basis domain.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kanpnp {

enum class BasisKind { BSpline, Fourier };

struct BasisSpec {
    BasisKind kind = BasisKind::BSpline;
    int grid_size = 5;   // G: interior knot intervals (B-spline)
    int order = 3;       // k: spline order, or harmonic count for Fourier
    double lo = -1.0;
    double hi = 1.0;

    int basis_count() const {
        return kind == BasisKind::BSpline ? grid_size + order : 2 * order + 1;
    }

    double spacing() const { return (hi - lo) / grid_size; }

    // extended uniform knot vector: t_i = lo + (i - k) * h, i = 0 .. G + 2k
    double knot(int i) const { return lo + (i - order) * spacing(); }

    void validate() const {
        if (grid_size < 1 || order < 1)
            throw std::invalid_argument("BasisSpec: grid_size and order must be >= 1");
        if (kind == BasisKind::BSpline && order > 15)
            throw std::invalid_argument("BasisSpec: spline order above 15 is not supported");
        if (!(lo < hi))
            throw std::invalid_argument("BasisSpec: domain must satisfy lo < hi");
    }
};

namespace detail {

// Nonzero B-spline values at x depend only on the position u within the
// containing interval once knots are uniform; the knot spacing cancels out
// of the Cox-de Boor recursion.
template <typename T>
inline int bspline_cell(const BasisSpec& b, T x, T& u) {
    T t = (x - static_cast<T>(b.lo)) / static_cast<T>(b.spacing());
    int cell = static_cast<int>(std::floor(static_cast<double>(t)));
    if (cell < 0) cell = 0;
    if (cell >= b.grid_size) cell = b.grid_size - 1;
    u = t - static_cast<T>(cell);
    return cell;
}

// vals[0..k] = B_{cell+r, k}(x), the k+1 basis functions alive on the cell.
template <typename T>
inline void bspline_nonzero(int k, T u, T* vals) {
    vals[0] = T(1);
    for (int d = 1; d <= k; ++d) {
        T saved = T(0);
        const T inv_d = T(1) / static_cast<T>(d);
        for (int r = 0; r < d; ++r) {
            const T temp = vals[r] * inv_d;
            vals[r] = saved + (static_cast<T>(r + 1) - u) * temp;
            saved = (u + static_cast<T>(d - r - 1)) * temp;
        }
        vals[d] = saved;
    }
}

template <typename T>
inline T clamp_domain(const BasisSpec& b, T x) {
    const T lo = static_cast<T>(b.lo), hi = static_cast<T>(b.hi);
    return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace detail

// Writes basis_count() values into out.
template <typename T>
inline void basis_eval(const BasisSpec& b, T x, T* out) {
    x = detail::clamp_domain(b, x);
    if (b.kind == BasisKind::BSpline) {
        const int k = b.order;
        const int nb = b.grid_size + k;
        for (int m = 0; m < nb; ++m) out[m] = T(0);
        T u;
        const int cell = detail::bspline_cell(b, x, u);
        T vals[16];
        detail::bspline_nonzero(k, u, vals);
        for (int r = 0; r <= k; ++r) out[cell + r] = vals[r];
    } else {
        out[0] = T(1);
        const T base = T(2) * static_cast<T>(M_PI) / static_cast<T>(b.hi - b.lo);
        const T xr = x - static_cast<T>(b.lo);
        for (int m = 1; m <= b.order; ++m) {
            const T w = static_cast<T>(m) * base;
            out[2 * m - 1] = std::cos(w * xr);
            out[2 * m] = std::sin(w * xr);
        }
    }
}

// Entrywise derivative of basis_eval with respect to x.
template <typename T>
inline void basis_deriv(const BasisSpec& b, T x, T* out) {
    x = detail::clamp_domain(b, x);
    if (b.kind == BasisKind::BSpline) {
        const int k = b.order;
        const int nb = b.grid_size + k;
        for (int m = 0; m < nb; ++m) out[m] = T(0);
        T u;
        const int cell = detail::bspline_cell(b, x, u);
        const T inv_h = T(1) / static_cast<T>(b.spacing());
        if (k == 1) {
            out[cell] = -inv_h;
            out[cell + 1] = inv_h;
            return;
        }
        // B'_{m,k} = (B_{m,k-1} - B_{m+1,k-1}) / h on a uniform knot grid
        T low[16];
        detail::bspline_nonzero(k - 1, u, low);  // low[r] = B_{cell+1+r, k-1}(x)
        out[cell] = -low[0] * inv_h;
        for (int r = 1; r < k; ++r) out[cell + r] = (low[r - 1] - low[r]) * inv_h;
        out[cell + k] = low[k - 1] * inv_h;
    } else {
        out[0] = T(0);
        const T base = T(2) * static_cast<T>(M_PI) / static_cast<T>(b.hi - b.lo);
        const T xr = x - static_cast<T>(b.lo);
        for (int m = 1; m <= b.order; ++m) {
            const T w = static_cast<T>(m) * base;
            out[2 * m - 1] = -w * std::sin(w * xr);
            out[2 * m] = w * std::cos(w * xr);
        }
    }
}

std::vector<double> basis_eval(const BasisSpec& b, double x);
std::vector<double> basis_deriv(const BasisSpec& b, double x);

}  // namespace kanpnp
