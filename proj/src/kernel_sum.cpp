#include "kernel_sum.hpp"

#include <algorithm>

namespace wwsim::kernel {

double build_cot_rows(int n, const double* er, const double* ei, const double* emod,
                      const double* inv_flat, const std::size_t* row, double* cre, double* cim) {
    double min_ratio = 1e300;
    for (int a = 0; a < n; ++a) {
        const double ar = er[a], ai = ei[a], am = emod[a];
        double* rr = cre + row[a];
        double* ri = cim + row[a];
        const int len = n - a - 1;
        const double* br = er + a + 1;
        const double* bi = ei + a + 1;
        const double* bm = emod + a + 1;
        const double* fl = inv_flat + 1;
        double local = 1e300;
        for (int t = 0; t < len; ++t) {
            const double nr = ar + br[t], ni = ai + bi[t];
            const double dr = ar - br[t], di = ai - bi[t];
            const double d2 = dr * dr + di * di;
            const double inv = 1.0 / d2;
            // i * (nr + i ni) * (dr - i di) / d2
            const double pr = nr * dr + ni * di;
            const double pi = ni * dr - nr * di;
            rr[t] = -pi * inv;
            ri[t] = pr * inv;
            local = std::min(local, d2 * fl[t] / (am * bm[t]));
        }
        min_ratio = std::min(min_ratio, local);
    }
    return min_ratio;
}

void antisymmetric_sum(int n, int m, const std::size_t* row, const double* cre, const double* cim,
                       const double* const* vr, const double* const* vi, double* const* orr,
                       double* const* oi) {
    for (int a = 0; a < n; ++a) {
        const double* rr = cre + row[a];
        const double* ri = cim + row[a];
        const int len = n - a - 1;
        for (int j = 0; j < m; ++j) {
            const double* xr = vr[j] + a + 1;
            const double* xi = vi[j] + a + 1;
            double* yr = orr[j] + a + 1;
            double* yi = oi[j] + a + 1;
            const double var = vr[j][a], vai = vi[j][a];
            double sr = 0.0, si = 0.0;
            for (int t = 0; t < len; ++t) {
                const double cr = rr[t], ci = ri[t];
                sr += cr * xr[t] - ci * xi[t];
                si += cr * xi[t] + ci * xr[t];
                yr[t] -= cr * var - ci * vai;
                yi[t] -= cr * vai + ci * var;
            }
            orr[j][a] += sr;
            oi[j][a] += si;
        }
    }
}

}  // namespace wwsim::kernel
