#include "dmdecoh/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace dmdecoh::quad {

GaussLegendre::GaussLegendre(int n) : x(n), w(n)
{
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 0 ? 1.0 : (n == 1 ? z : p1);
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (z * pn - pnm1) / (z * z - 1.0);
            const double dz = pn / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

const GaussLegendre& gauss_legendre(int n)
{
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
}

} // namespace dmdecoh::quad
