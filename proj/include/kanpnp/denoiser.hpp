// Prior interface for the PnP driver. A prior supplies the initial estimate
// from the back-projection and the denoising step applied to z - u.
#pragma once

#include <memory>

#include "kanpnp/image.hpp"
#include "kanpnp/network.hpp"
#include "kanpnp/trainer.hpp"
#include "kanpnp/tv.hpp"

namespace kanpnp {

class Denoiser {
public:
    virtual ~Denoiser() = default;
    virtual ImageGrid init_estimate(const ImageGrid& z0) = 0;
    virtual ImageGrid apply(const ImageGrid& target) = 0;
};

template <typename T>
class KanDenoiser final : public Denoiser {
public:
    KanDenoiser(KanNetworkT<T> net, DenoiseConfig cfg)
        : net_(std::move(net)), cfg_(cfg) {}

    ImageGrid init_estimate(const ImageGrid& z0) override {
        return render_network(net_, z0.height, z0.width);
    }

    ImageGrid apply(const ImageGrid& target) override {
        auto [img, net] = apply_denoiser(std::move(net_), target, cfg_);
        net_ = std::move(net);
        return img;
    }

    const KanNetworkT<T>& network() const { return net_; }
    KanNetworkT<T> take_network() { return std::move(net_); }

private:
    KanNetworkT<T> net_;
    DenoiseConfig cfg_;
};

class TvDenoiser final : public Denoiser {
public:
    TvDenoiser(double weight, int iters) : weight_(weight), iters_(iters) {}

    ImageGrid init_estimate(const ImageGrid& z0) override {
        return tv_denoise(z0, weight_, iters_);
    }

    ImageGrid apply(const ImageGrid& target) override {
        return tv_denoise(target, weight_, iters_);
    }

private:
    double weight_;
    int iters_;
};

}  // namespace kanpnp
