#include "kanpnp/basis.hpp"

namespace kanpnp {

std::vector<double> basis_eval(const BasisSpec& b, double x) {
    b.validate();
    std::vector<double> out(b.basis_count());
    basis_eval<double>(b, x, out.data());
    return out;
}

std::vector<double> basis_deriv(const BasisSpec& b, double x) {
    b.validate();
    std::vector<double> out(b.basis_count());
    basis_deriv<double>(b, x, out.data());
    return out;
}

}  // namespace kanpnp
