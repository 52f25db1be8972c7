#include "ddc/data.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ddc/numerics.hpp"

namespace ddc {

void DataSet::validate() const {
    if (experiments.empty())
        throw DimensionMismatch("DataSet: at least one experiment required");
    for (size_t i = 0; i < experiments.size(); ++i) {
        const Experiment& e = experiments[i];
        const std::string tag = "experiment " + std::to_string(i);
        if (e.u.rows() != m)
            throw DimensionMismatch(tag + ": input dimension != m");
        if (e.u.cols() < 1)
            throw DimensionMismatch(tag + ": empty input sequence");
        if (e.x) {
            if (e.x->rows() != n)
                throw DimensionMismatch(tag + ": state dimension != n");
            if (e.x->cols() != e.u.cols() + 1)
                throw DimensionMismatch(tag + ": state path length must be T+1");
        }
        if (e.y) {
            if (e.y->rows() != p)
                throw DimensionMismatch(tag + ": output dimension != p");
            if (e.y->cols() != e.u.cols())
                throw DimensionMismatch(tag + ": output length must equal T");
        }
    }
}

Eigen::Index DataSet::total_columns() const {
    Eigen::Index total = 0;
    for (const Experiment& e : experiments) total += e.length();
    return total;
}

BlockMatrices assemble(const DataSet& data) {
    data.validate();
    for (size_t i = 0; i < data.experiments.size(); ++i)
        if (!data.experiments[i].x)
            throw MissingStates("assemble: experiment " + std::to_string(i) +
                                " carries no state path");

    const Eigen::Index T = data.total_columns();
    const bool with_outputs =
        data.p > 0 && std::all_of(data.experiments.begin(),
                                  data.experiments.end(),
                                  [](const Experiment& e) { return bool(e.y); });
    BlockMatrices bm;
    bm.U_minus.resize(data.m, T);
    bm.X_minus.resize(data.n, T);
    bm.X_plus.resize(data.n, T);
    if (with_outputs) bm.Y_minus = Matrix(data.p, T);

    Eigen::Index col = 0;
    for (const Experiment& e : data.experiments) {
        const Eigen::Index Ti = e.length();
        bm.U_minus.middleCols(col, Ti) = e.u;
        bm.X_minus.middleCols(col, Ti) = e.x->leftCols(Ti);
        bm.X_plus.middleCols(col, Ti) = e.x->rightCols(Ti);
        if (with_outputs) bm.Y_minus->middleCols(col, Ti) = *e.y;
        col += Ti;
    }
    return bm;
}

Matrix hankel(const Matrix& f, int depth) {
    const Eigen::Index T = f.cols();
    const Eigen::Index m = f.rows();
    if (depth < 1 || depth >= T)
        throw DepthTooLarge("hankel: depth must satisfy 1 <= depth < T");
    Matrix H(m * depth, T - depth + 1);
    for (int i = 0; i < depth; ++i)
        H.middleRows(static_cast<Eigen::Index>(i) * m, m) =
            f.middleCols(i, T - depth + 1);
    return H;
}

int persistency_order(const Matrix& u, double rank_scale) {
    if (u.cols() < 1) throw DimensionMismatch("persistency_order: empty input");
    const Eigen::Index m = u.rows();
    const Eigen::Index T = u.cols();
    int best = 0;
    for (int L = 1; L < T; ++L) {
        Matrix H = hankel(u, L);
        if (numerics::rank_tol(H, rank_scale) == m * L)
            best = L;
        else
            break;  // a rank drop at depth L persists for larger depths
    }
    return best;
}

namespace {

using nlohmann::json;

Matrix time_major_to_matrix(const json& arr, const std::string& what) {
    if (!arr.is_array() || arr.empty())
        throw DimensionMismatch("data file: " + what + " must be a nonempty array");
    const size_t T = arr.size();
    const size_t dim = arr[0].size();
    Matrix M(dim, T);
    for (size_t t = 0; t < T; ++t) {
        if (arr[t].size() != dim)
            throw DimensionMismatch("data file: ragged rows in " + what);
        for (size_t i = 0; i < dim; ++i) M(i, t) = arr[t][i].get<double>();
    }
    return M;
}

json matrix_to_time_major(const Matrix& M) {
    json arr = json::array();
    for (Eigen::Index t = 0; t < M.cols(); ++t) {
        json row = json::array();
        for (Eigen::Index i = 0; i < M.rows(); ++i) row.push_back(M(i, t));
        arr.push_back(row);
    }
    return arr;
}

}  // namespace

DataSet parse_dataset_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw MalformedProblem(std::string("data file: invalid JSON: ") +
                               e.what());
    }
    DataSet ds;
    ds.n = j.at("n").get<int>();
    ds.m = j.at("m").get<int>();
    ds.p = j.value("p", 0);
    for (const json& je : j.at("experiments")) {
        Experiment e;
        e.u = time_major_to_matrix(je.at("u"), "u");
        if (je.contains("x") && !je["x"].is_null())
            e.x = time_major_to_matrix(je["x"], "x");
        if (je.contains("y") && !je["y"].is_null())
            e.y = time_major_to_matrix(je["y"], "y");
        ds.experiments.push_back(std::move(e));
    }
    ds.validate();
    return ds;
}

std::string dataset_to_json(const DataSet& data) {
    json j;
    j["n"] = data.n;
    j["m"] = data.m;
    j["p"] = data.p;
    j["experiments"] = json::array();
    for (const Experiment& e : data.experiments) {
        json je;
        je["u"] = matrix_to_time_major(e.u);
        if (e.x) je["x"] = matrix_to_time_major(*e.x);
        if (e.y) je["y"] = matrix_to_time_major(*e.y);
        j["experiments"].push_back(je);
    }
    return j.dump(2);
}

DataSet load_dataset_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open data file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_dataset_json(ss.str());
}

void save_dataset_json(const DataSet& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write data file: " + path);
    out << dataset_to_json(data) << "\n";
}

Matrix load_csv_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DimensionMismatch("CSV file: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DimensionMismatch("CSV file: empty: " + path);
    Matrix M(rows.front().size(), rows.size());
    for (size_t t = 0; t < rows.size(); ++t)
        for (size_t i = 0; i < rows[t].size(); ++i) M(i, t) = rows[t][i];
    return M;
}

}  // namespace ddc
