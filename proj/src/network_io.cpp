// Binary network files: fixed-width little-endian fields, coefficient
// arrays dumped verbatim so a save/load round trip is bit-exact.
#include <cstdint>
#include <cstring>
#include <fstream>

#include "kanpnp/network.hpp"

namespace kanpnp {
namespace {

constexpr char kMagic[8] = {'K', 'A', 'N', 'N', 'E', 'T', '0', '1'};

template <typename V>
void put(std::ofstream& out, V v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V get(std::ifstream& in) {
    V v;
    in.read(reinterpret_cast<char*>(&v), sizeof(V));
    if (!in) throw std::runtime_error("network file truncated");
    return v;
}

template <typename T>
void save_impl(const KanNetworkT<T>& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, sizeof(T));
    put<std::uint64_t>(out, net.seed);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(net.dims.size()));
    for (int d : net.dims) put<std::int32_t>(out, d);
    for (const auto& layer : net.layers) {
        put<std::uint32_t>(out, layer.basis.kind == BasisKind::BSpline ? 0u : 1u);
        put<std::int32_t>(out, layer.basis.grid_size);
        put<std::int32_t>(out, layer.basis.order);
        put<double>(out, layer.basis.lo);
        put<double>(out, layer.basis.hi);
        out.write(reinterpret_cast<const char*>(layer.coeff.data()),
                  layer.coeff.size() * sizeof(T));
        out.write(reinterpret_cast<const char*>(layer.base_weight.data()),
                  layer.base_weight.size() * sizeof(T));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

template <typename T>
KanNetworkT<T> load_impl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open network file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a network file: " + path);
    const auto width = get<std::uint32_t>(in);
    if (width != sizeof(T))
        throw std::runtime_error("network file scalar width " + std::to_string(width) +
                                 " does not match requested width " + std::to_string(sizeof(T)));
    KanNetworkT<T> net;
    net.seed = get<std::uint64_t>(in);
    const auto n_dims = get<std::uint32_t>(in);
    if (n_dims < 2 || n_dims > 64) throw std::runtime_error("network file: bad dims");
    net.dims.resize(n_dims);
    for (auto& d : net.dims) {
        d = get<std::int32_t>(in);
        if (d < 1) throw std::runtime_error("network file: bad layer width");
    }
    for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
        KanLayerT<T> layer;
        layer.in_dim = net.dims[l];
        layer.out_dim = net.dims[l + 1];
        const auto kind = get<std::uint32_t>(in);
        layer.basis.kind = kind == 0 ? BasisKind::BSpline : BasisKind::Fourier;
        layer.basis.grid_size = get<std::int32_t>(in);
        layer.basis.order = get<std::int32_t>(in);
        layer.basis.lo = get<double>(in);
        layer.basis.hi = get<double>(in);
        layer.basis.validate();
        const int nb = layer.basis.basis_count();
        layer.coeff.resize(layer.out_dim, layer.in_dim * nb);
        layer.base_weight.resize(layer.out_dim, layer.in_dim);
        in.read(reinterpret_cast<char*>(layer.coeff.data()), layer.coeff.size() * sizeof(T));
        in.read(reinterpret_cast<char*>(layer.base_weight.data()),
                layer.base_weight.size() * sizeof(T));
        if (!in) throw std::runtime_error("network file truncated: " + path);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

}  // namespace

void save_network(const KanNetworkT<double>& net, const std::string& path) {
    save_impl(net, path);
}
void save_network(const KanNetworkT<float>& net, const std::string& path) {
    save_impl(net, path);
}
KanNetworkT<double> load_network(const std::string& path) { return load_impl<double>(path); }
KanNetworkT<float> load_network_f(const std::string& path) { return load_impl<float>(path); }

}  // namespace kanpnp
