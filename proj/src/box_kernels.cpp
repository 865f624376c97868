#include "box_kernels.hpp"

#include "clab/numeric.hpp"
#include "clab/parallel.hpp"

namespace clab::detail {

namespace {

std::size_t ipow(std::int64_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
    return r;
}

// Plain dot products are fine at this length; outer averages are compensated.
double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

struct Workspace {
    std::vector<std::vector<double>> buffers;
    std::vector<std::span<const double>> views;

    Workspace(std::size_t half, std::size_t len) : buffers(half, std::vector<double>(len)) {
        for (auto& b : buffers) views.emplace_back(b);
    }

    void fill(std::span<const std::span<const double>> family, std::size_t half, std::size_t len,
              std::size_t a, std::size_t a2) {
        for (std::size_t w = 0; w < half; ++w) {
            const double* lo = family[w].data() + a * len;
            const double* hi = family[w | half].data() + a2 * len;
            double* out = buffers[w].data();
            for (std::size_t i = 0; i < len; ++i) out[i] = lo[i] * hi[i];
        }
    }
};

double inner_impl(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k,
                  bool parallel);
void dual_impl(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k,
               std::span<double> out, bool parallel);

double box_inner_rows(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k,
                      std::size_t a, Workspace& ws) {
    const std::size_t half = std::size_t{1} << (k - 1);
    const std::size_t len = ipow(n, k - 1);
    CompensatedSum row;
    for (std::size_t a2 = 0; a2 < static_cast<std::size_t>(n); ++a2) {
        ws.fill(family, half, len, a, a2);
        row.add(inner_impl(ws.views, n, k - 1, false));
    }
    return row.value();
}

double inner_impl(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k,
                  bool parallel) {
    if (k == 1) return mean_of(family[0]) * mean_of(family[1]);
    const std::size_t half = std::size_t{1} << (k - 1);
    const std::size_t len = ipow(n, k - 1);
    const auto rows = static_cast<std::size_t>(n);
    std::vector<double> partial(rows);
    if (parallel && len >= 64) {
        // top-level rows run in parallel; reduction order stays fixed
        for_each_block(rows, [&](std::size_t a) {
            Workspace ws(half, len);
            partial[a] = box_inner_rows(family, n, k, a, ws);
        });
    } else {
        Workspace ws(half, len);
        for (std::size_t a = 0; a < rows; ++a) partial[a] = box_inner_rows(family, n, k, a, ws);
    }
    CompensatedSum total;
    for (double p : partial) total.add(p);
    return total.value() / (static_cast<double>(n) * static_cast<double>(n));
}

void dual_impl(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k,
               std::span<double> out, bool parallel) {
    if (k == 1) {
        const double m = mean_of(family[1]);
        for (std::size_t y = 0; y < out.size(); ++y) out[y] = family[0][y] * m;
        return;
    }
    const std::size_t half = std::size_t{1} << (k - 1);
    const std::size_t len = ipow(n, k - 1);
    const auto rows = static_cast<std::size_t>(n);
    auto do_row = [&](std::size_t a) {
        Workspace ws(half, len);
        std::vector<double> tmp(len);
        std::vector<CompensatedSum> acc(len);
        for (std::size_t a2 = 0; a2 < rows; ++a2) {
            ws.fill(family, half, len, a, a2);
            dual_impl(ws.views, n, k - 1, tmp, false);
            for (std::size_t y = 0; y < len; ++y) acc[y].add(tmp[y]);
        }
        for (std::size_t y = 0; y < len; ++y) out[a * len + y] = acc[y].value() / static_cast<double>(n);
    };
    if (parallel && len >= 64)
        for_each_block(rows, do_row);
    else
        for (std::size_t a = 0; a < rows; ++a) do_row(a);
}

}  // namespace

double std_box_inner(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k) {
    return inner_impl(family, n, k, true);
}

void std_dual(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k,
              std::span<double> out) {
    dual_impl(family, n, k, out, true);
}

}  // namespace clab::detail
