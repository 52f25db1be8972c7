#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddc/types.hpp"

namespace ddc {

// Measured trajectories on one time interval. Columns are time samples:
// u is m x T; x, when present, is n x (T+1); y, when present, is p x T.
struct Experiment {
    Matrix u;
    std::optional<Matrix> x;
    std::optional<Matrix> y;

    Eigen::Index length() const { return u.cols(); }
};

struct DataSet {
    std::vector<Experiment> experiments;
    int n = 0;
    int m = 0;
    int p = 0;

    // Throws DimensionMismatch if any experiment disagrees with the
    // declared dimensions or violates the length invariants.
    void validate() const;

    Eigen::Index total_columns() const;
};

// The paper's concatenated block data matrices.
struct BlockMatrices {
    Matrix U_minus;  // m x T
    Matrix X_minus;  // n x T
    Matrix X_plus;   // n x T
    std::optional<Matrix> Y_minus;  // p x T

    Eigen::Index n() const { return X_minus.rows(); }
    Eigen::Index m() const { return U_minus.rows(); }
    Eigen::Index T() const { return X_minus.cols(); }
};

// Per-experiment shifted slices concatenated in experiment order.
BlockMatrices assemble(const DataSet& data);

// Block Hankel matrix of depth ell: block (i,j) = f(i+j), 0-indexed.
// f is given column-per-sample (m x T).
Matrix hankel(const Matrix& f, int depth);

// Largest L >= 0 such that the depth-L input Hankel matrix has full row
// rank m*L (0 if none). Single-experiment input only.
int persistency_order(const Matrix& u, double rank_scale = 1.0);

// Canonical JSON data format (time-major arrays).
DataSet load_dataset_json(const std::string& path);
void save_dataset_json(const DataSet& data, const std::string& path);
DataSet parse_dataset_json(const std::string& text);
std::string dataset_to_json(const DataSet& data);

// CSV import: one file per signal, rows = time, columns = channels.
// Returns the matrix transposed into column-per-sample layout.
Matrix load_csv_signal(const std::string& path);

}  // namespace ddc
