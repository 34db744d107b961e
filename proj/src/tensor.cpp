#include "wkit/tensor.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>

namespace wkit {

namespace {

long ipow_long(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Decomposition of a flat index over n spaces into a part on the selected
// positions (sub) and a part on the others (base): I = base[r] + off[a].
struct Split {
    std::vector<long> base;  // one entry per index over the unselected spaces
    std::vector<long> off;   // one entry per index over the selected spaces, in selection order
    std::vector<long> sub_of;   // flat index -> selected index
    std::vector<long> rest_of;  // flat index -> base value
};

Split make_split(int n, int dim, const std::vector<int>& selected) {
    std::vector<long> stride(n);
    for (int i = 0; i < n; ++i) stride[i] = ipow_long(dim, n - 1 - i);
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (std::find(selected.begin(), selected.end(), i) == selected.end()) rest.push_back(i);

    auto enumerate = [&](const std::vector<int>& pos) {
        const long count = ipow_long(dim, int(pos.size()));
        std::vector<long> out(count, 0);
        for (long idx = 0; idx < count; ++idx) {
            long rem = idx;
            long flat = 0;
            for (int a = int(pos.size()) - 1; a >= 0; --a) {
                flat += (rem % dim) * stride[pos[a]];
                rem /= dim;
            }
            out[idx] = flat;
        }
        return out;
    };
    Split s;
    s.off = enumerate(selected);
    s.base = enumerate(rest);
    const long total = ipow_long(dim, n);
    s.sub_of.assign(total, 0);
    s.rest_of.assign(total, 0);
    for (long r = 0; r < long(s.base.size()); ++r)
        for (long a = 0; a < long(s.off.size()); ++a) {
            s.sub_of[s.base[r] + s.off[a]] = a;
            s.rest_of[s.base[r] + s.off[a]] = s.base[r];
        }
    return s;
}

std::vector<int> positions_in(const std::vector<std::string>& labels,
                              const std::vector<std::string>& wanted) {
    std::vector<int> pos;
    for (const auto& w : wanted) {
        auto it = std::find(labels.begin(), labels.end(), w);
        if (it == labels.end()) throw LabelMismatch("label '" + w + "' not present");
        pos.push_back(int(it - labels.begin()));
    }
    return pos;
}

void require_unique(const std::vector<std::string>& labels) {
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) throw LabelMismatch("duplicate space label");
}

}  // namespace

long max_dimension() {
    if (const char* env = std::getenv("WKIT_MAX_DIM")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v >= 1.0) return long(v);
    }
    return 10000;
}

void check_dimension(long rows) {
    if (rows > max_dimension())
        throw DimensionGuardExceeded("operator with " + std::to_string(rows) +
                                     " rows exceeds the dimension guard of " +
                                     std::to_string(max_dimension()));
}

double rel_residual(const Mat& a, const Mat& b) {
    const double scale = std::max({a.norm(), b.norm(), 1e-300});
    return (a - b).norm() / scale;
}

LabeledTensor::LabeledTensor(std::vector<std::string> labels, int dim, Mat matrix)
    : labels_(std::move(labels)), dim_(dim), matrix_(std::move(matrix)) {
    require_unique(labels_);
    const long expected = ipow_long(dim_, int(labels_.size()));
    if (matrix_.rows() != expected || matrix_.cols() != expected)
        throw LabelMismatch("matrix size does not match the labeled spaces");
    check_dimension(expected);
}

LabeledTensor LabeledTensor::identity(std::vector<std::string> labels, int dim) {
    const long d = ipow_long(dim, int(labels.size()));
    check_dimension(d);
    return LabeledTensor(std::move(labels), dim, Mat::Identity(d, d));
}

bool LabeledTensor::has(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

int LabeledTensor::position(const std::string& label) const {
    return positions_in(labels_, {label}).front();
}

LabeledTensor LabeledTensor::inverse() const {
    return LabeledTensor(labels_, dim_, matrix_.partialPivLu().inverse());
}

LabeledTensor LabeledTensor::scaled(cplx factor) const {
    return LabeledTensor(labels_, dim_, matrix_ * factor);
}

namespace {

std::vector<std::string> label_union(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b) {
    auto out = a;
    for (const auto& l : b)
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    return out;
}

}  // namespace

LabeledTensor LabeledTensor::operator*(const LabeledTensor& rhs) const {
    if (dim_ != rhs.dim_) throw LabelMismatch("space dimensions differ");
    const auto u = label_union(labels_, rhs.labels_);
    if (u == labels_ && u == rhs.labels_) return LabeledTensor(u, dim_, matrix_ * rhs.matrix_);
    if (u == rhs.labels_) return tensor::apply_left(*this, rhs);
    if (u == labels_) return tensor::apply_right(*this, rhs);
    const auto big = tensor::embed(rhs, u);
    return tensor::apply_left(*this, big);
}

LabeledTensor LabeledTensor::operator+(const LabeledTensor& rhs) const {
    const auto u = label_union(labels_, rhs.labels_);
    return LabeledTensor(u, dim_,
                         tensor::embed(*this, u).matrix() + tensor::embed(rhs, u).matrix());
}

LabeledTensor LabeledTensor::operator-(const LabeledTensor& rhs) const {
    return *this + rhs.scaled(-1.0);
}

namespace tensor {

std::vector<std::string> numbered_labels(int count, const std::string& suffix) {
    std::vector<std::string> out;
    for (int i = 1; i <= count; ++i) out.push_back(std::to_string(i) + suffix);
    return out;
}

LabeledTensor embed(const LabeledTensor& op, const std::vector<std::string>& target) {
    require_unique(target);
    const auto pos = positions_in(target, op.labels());
    const int n = int(target.size());
    const int dim = op.dim();
    check_dimension(ipow_long(dim, n));
    const Split s = make_split(n, dim, pos);
    const long D = ipow_long(dim, n);
    Mat out = Mat::Zero(D, D);
    const Mat& a = op.matrix();
    for (long b : s.base)
        for (long i = 0; i < long(s.off.size()); ++i)
            for (long j = 0; j < long(s.off.size()); ++j) out(b + s.off[i], b + s.off[j]) = a(i, j);
    return LabeledTensor(target, dim, std::move(out));
}

LabeledTensor relabel(const LabeledTensor& op, const std::vector<std::string>& labels) {
    if (labels.size() != op.labels().size()) throw LabelMismatch("relabel changes the space count");
    return LabeledTensor(labels, op.dim(), op.matrix());
}

LabeledTensor partial_trace(const LabeledTensor& op, const std::vector<std::string>& labels) {
    const auto pos = positions_in(op.labels(), labels);
    const int n = op.spaces();
    const Split s = make_split(n, op.dim(), pos);
    std::vector<std::string> kept;
    for (int i = 0; i < n; ++i)
        if (std::find(pos.begin(), pos.end(), i) == pos.end()) kept.push_back(op.labels()[i]);
    const long d = long(s.base.size());
    Mat out = Mat::Zero(d, d);
    const Mat& m = op.matrix();
    for (long r = 0; r < d; ++r)
        for (long c = 0; c < d; ++c) {
            cplx acc = 0.0;
            for (long a : s.off) acc += m(s.base[r] + a, s.base[c] + a);
            out(r, c) = acc;
        }
    return LabeledTensor(kept, op.dim(), std::move(out));
}

LabeledTensor partial_transpose(const LabeledTensor& op, const std::vector<std::string>& labels) {
    const auto pos = positions_in(op.labels(), labels);
    const Split s = make_split(op.spaces(), op.dim(), pos);
    const Mat& m = op.matrix();
    Mat out(m.rows(), m.cols());
    for (long bi : s.base)
        for (long bj : s.base)
            for (long a : s.off)
                for (long b : s.off) out(bi + a, bj + b) = m(bi + b, bj + a);
    return LabeledTensor(op.labels(), op.dim(), std::move(out));
}

LabeledTensor apply_left(const LabeledTensor& small, const LabeledTensor& big) {
    if (small.dim() != big.dim()) throw LabelMismatch("space dimensions differ");
    const auto pos = positions_in(big.labels(), small.labels());
    const Split s = make_split(big.spaces(), big.dim(), pos);
    const Mat& a = small.matrix();
    const Mat& b = big.matrix();
    Mat out = Mat::Zero(b.rows(), b.cols());
    for (long I = 0; I < b.rows(); ++I) {
        const long sub = s.sub_of[I];
        const long base = s.rest_of[I];
        for (long j = 0; j < long(s.off.size()); ++j) {
            const cplx coeff = a(sub, j);
            if (coeff != 0.0) out.row(I) += coeff * b.row(base + s.off[j]);
        }
    }
    return LabeledTensor(big.labels(), big.dim(), std::move(out));
}

LabeledTensor apply_right(const LabeledTensor& big, const LabeledTensor& small) {
    if (small.dim() != big.dim()) throw LabelMismatch("space dimensions differ");
    const auto pos = positions_in(big.labels(), small.labels());
    const Split s = make_split(big.spaces(), big.dim(), pos);
    const Mat& a = small.matrix();
    const Mat& b = big.matrix();
    Mat out = Mat::Zero(b.rows(), b.cols());
    for (long J = 0; J < b.cols(); ++J) {
        const long sub = s.sub_of[J];
        const long base = s.rest_of[J];
        for (long i = 0; i < long(s.off.size()); ++i) {
            const cplx coeff = a(i, sub);
            if (coeff != 0.0) out.col(J) += coeff * b.col(base + s.off[i]);
        }
    }
    return LabeledTensor(big.labels(), big.dim(), std::move(out));
}

LabeledTensor permutation_operator(const std::vector<int>& sigma,
                                   const std::vector<std::string>& labels, int dim) {
    const int k = int(sigma.size());
    if (int(labels.size()) != k) throw LabelMismatch("permutation size differs from label count");
    const long D = ipow_long(dim, k);
    Mat out = Mat::Zero(D, D);
    std::vector<int> digits(k), moved(k);
    for (long idx = 0; idx < D; ++idx) {
        long rem = idx;
        for (int a = k - 1; a >= 0; --a) {
            digits[a] = int(rem % dim);
            rem /= dim;
        }
        for (int a = 0; a < k; ++a) moved[sigma[a]] = digits[a];
        long target = 0;
        for (int a = 0; a < k; ++a) target = target * dim + moved[a];
        out(target, idx) = 1.0;
    }
    return LabeledTensor(labels, dim, std::move(out));
}

int Antisymmetrizer::rank() const {
    Eigen::JacobiSVD<Mat> svd(proj.matrix());
    const auto& sv = svd.singularValues();
    return int((sv.array() > 0.5).count());
}

double Antisymmetrizer::idempotency_residual() const {
    const Mat& a = proj.matrix();
    return rel_residual(a * a, a);
}

Antisymmetrizer antisymmetrizer(int k, int N, std::vector<std::string> labels) {
    if (k < 1 || k > N) throw InvalidParams("antisymmetrizer needs 1 <= k <= N");
    if (labels.empty()) labels = numbered_labels(k);
    std::vector<int> sigma(k);
    std::iota(sigma.begin(), sigma.end(), 0);
    const long D = ipow_long(N, k);
    Mat sum = Mat::Zero(D, D);
    long count = 0;
    do {
        int inversions = 0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) inversions += sigma[a] > sigma[b];
        const double sign = inversions % 2 ? -1.0 : 1.0;
        sum += sign * permutation_operator(sigma, labels, N).matrix();
        ++count;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return {k, N, LabeledTensor(labels, N, sum / double(count))};
}

}  // namespace tensor
}  // namespace wkit
