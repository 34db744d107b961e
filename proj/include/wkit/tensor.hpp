#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wkit/errors.hpp"
#include "wkit/qseries.hpp"

namespace wkit {

using Mat = Eigen::MatrixXcd;

// Dense operator on an ordered list of labeled spaces, each of dimension `dim`.
// Space order matches the Kronecker order: the first label is the slowest index.
class LabeledTensor {
public:
    LabeledTensor() = default;
    LabeledTensor(std::vector<std::string> labels, int dim, Mat matrix);

    static LabeledTensor identity(std::vector<std::string> labels, int dim);

    const std::vector<std::string>& labels() const { return labels_; }
    int dim() const { return dim_; }
    int spaces() const { return int(labels_.size()); }
    const Mat& matrix() const { return matrix_; }
    Eigen::Index rows() const { return matrix_.rows(); }

    bool has(const std::string& label) const;
    int position(const std::string& label) const;

    double norm() const { return matrix_.norm(); }
    LabeledTensor inverse() const;
    LabeledTensor scaled(cplx factor) const;

    // Product with automatic embedding into the union of both label lists.
    LabeledTensor operator*(const LabeledTensor& rhs) const;
    LabeledTensor operator+(const LabeledTensor& rhs) const;
    LabeledTensor operator-(const LabeledTensor& rhs) const;

private:
    std::vector<std::string> labels_;
    int dim_ = 0;
    Mat matrix_;
};

// Rows above this size are refused. Overridden by the WKIT_MAX_DIM environment variable.
long max_dimension();
void check_dimension(long rows);

// ||A - B||_F / max(||A||_F, ||B||_F).
double rel_residual(const Mat& a, const Mat& b);

namespace tensor {

std::vector<std::string> numbered_labels(int count, const std::string& suffix = "");

LabeledTensor embed(const LabeledTensor& op, const std::vector<std::string>& target);
LabeledTensor relabel(const LabeledTensor& op, const std::vector<std::string>& labels);
LabeledTensor partial_trace(const LabeledTensor& op, const std::vector<std::string>& labels);
LabeledTensor partial_transpose(const LabeledTensor& op, const std::vector<std::string>& labels);

// embed(small, big.labels()) * big without forming the embedded matrix.
LabeledTensor apply_left(const LabeledTensor& small, const LabeledTensor& big);
// big * embed(small, big.labels()).
LabeledTensor apply_right(const LabeledTensor& big, const LabeledTensor& small);

// P_sigma sends e_{i_1..i_k} to the basis vector whose slot sigma(a) holds i_a.
LabeledTensor permutation_operator(const std::vector<int>& sigma,
                                   const std::vector<std::string>& labels, int dim);

struct Antisymmetrizer {
    int k = 0;
    int N = 0;
    LabeledTensor proj;

    int rank() const;
    double idempotency_residual() const;
};

Antisymmetrizer antisymmetrizer(int k, int N, std::vector<std::string> labels = {});

}  // namespace tensor
}  // namespace wkit
