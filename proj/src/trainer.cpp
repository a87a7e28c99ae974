#include "kanpnp/trainer.hpp"

#include <cstdio>
#include <stdexcept>

namespace kanpnp {

void write_loss_csv(const std::string& path, const std::vector<double>& trace) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "iteration,mse\n");
    for (std::size_t i = 0; i < trace.size(); ++i)
        std::fprintf(f, "%zu,%.17g\n", i, trace[i]);
    std::fclose(f);
}

}  // namespace kanpnp
