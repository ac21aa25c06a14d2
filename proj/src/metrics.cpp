#include "ksum/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ksum/error.hpp"

namespace ksum {

double amari_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw invalid_input("amari: matrices must be square and of equal size");
    const std::size_t d = a.rows();
    if (d < 2) throw invalid_input("amari: undefined for 1x1 matrices");
    Matrix p = a * inverse(b);

    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double sum = 0.0, mx = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double v = std::abs(p(i, j));
            sum += v;
            mx = std::max(mx, v);
        }
        total += sum / mx - 1.0;
    }
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0, mx = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double v = std::abs(p(i, j));
            sum += v;
            mx = std::max(mx, v);
        }
        total += sum / mx - 1.0;
    }
    return total / (2.0 * static_cast<double>(d)) / (static_cast<double>(d) - 1.0);
}

double separation_error(std::span<const int> labels_true, std::span<const int> side) {
    if (labels_true.size() != side.size())
        throw invalid_input("separation_error: length mismatch");
    if (labels_true.empty()) throw invalid_input("separation_error: empty input");

    int first = labels_true[0];
    bool two_labels = false;
    for (int l : labels_true)
        if (l != first) {
            two_labels = true;
            break;
        }
    if (!two_labels)
        throw invalid_input("separation_error: need two distinct true labels");

    std::size_t mismatch = 0;
    for (std::size_t i = 0; i < side.size(); ++i) {
        bool lab = labels_true[i] != first;
        bool pos = side[i] > 0;
        if (lab != pos) ++mismatch;
    }
    double f = static_cast<double>(mismatch) / static_cast<double>(side.size());
    return std::min(f, 1.0 - f);
}

double r_squared(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw invalid_input("r_squared: length mismatch");
    if (y.size() < 2) throw invalid_input("r_squared: need at least two observations");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) throw invalid_input("r_squared: constant response");
    return 1.0 - ss_res / ss_tot;
}

} // namespace ksum
