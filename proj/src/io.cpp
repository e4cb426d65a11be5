#include "convexkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "convexkit/errors.hpp"

namespace convexkit {

namespace {

double number_at(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + " is not a number");
    return j.get<double>();
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_number(const std::string& s, double& v) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size();
}

}  // namespace

Mat matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) throw ParseError("matrix rows must be nonempty arrays");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Mat A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError("matrix row " + std::to_string(i) + " has the wrong length");
        for (Eigen::Index k = 0; k < cols; ++k)
            A(i, k) = number_at(row[static_cast<std::size_t>(k)], "matrix entry (" + std::to_string(i) + ", " +
                                                                      std::to_string(k) + ")");
    }
    return A;
}

Vec vector_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("vector must be an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = number_at(j[i], "vector entry " + std::to_string(i));
    return v;
}

Json matrix_to_json(const Mat& A) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < A.cols(); ++k) row.push_back(A(i, k));
        out.push_back(std::move(row));
    }
    return out;
}

Json vector_to_json(const Vec& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write " + path);
    out << content;
    if (!out) throw DomainError("write failed for " + path);
}

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(source + ": " + e.what());
    }
}

Json read_json_file(const std::string& path) { return parse_json(read_text_file(path), path); }

LinearProgram lp_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("LP document must be an object");
    for (const auto& key : {"A", "b", "c"})
        if (!j.contains(key)) throw ParseError(std::string("LP document lacks \"") + key + "\"");
    LinearProgram lp;
    lp.A = matrix_from_json(j.at("A"));
    lp.b = vector_from_json(j.at("b"));
    lp.c = vector_from_json(j.at("c"));
    if (lp.b.size() != lp.A.rows() || lp.c.size() != lp.A.cols()) throw DimensionMismatch("LP sizes disagree");
    if (j.contains("A_eq") != j.contains("b_eq")) throw ParseError("A_eq and b_eq come together");
    if (j.contains("A_eq")) {
        lp.A_eq = matrix_from_json(j.at("A_eq"));
        lp.b_eq = vector_from_json(j.at("b_eq"));
        if (lp.A_eq.cols() != lp.A.cols() || lp.b_eq.size() != lp.A_eq.rows())
            throw DimensionMismatch("equality sizes disagree");
    }
    for (const auto& [key, _] : j.items())
        if (key != "A" && key != "b" && key != "c" && key != "A_eq" && key != "b_eq")
            throw ParseError("unknown LP key \"" + key + "\"");
    return lp;
}

Json lp_result_to_json(const LpResult& r) {
    Json out;
    out["x"] = vector_to_json(r.x);
    out["value"] = r.value;
    out["certificate"] = {{"t_final", r.t_final}, {"gap_bound", r.gap_bound}};
    out["phase_one_steps"] = r.phase_one_steps;
    out["backward_steps"] = r.backward_steps;
    out["path_steps"] = r.path.states.empty() ? 0 : static_cast<long>(r.path.states.size()) - 1;
    return out;
}

Mat parse_matrix_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string line;
    long line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const std::string& field : split_fields(line)) {
            double v = 0.0;
            if (!parse_number(field, v))
                throw ParseError("line " + std::to_string(line_no) + ": \"" + field + "\" is not a number");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                             " fields, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty matrix CSV");
    Mat A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    return A;
}

Mat read_matrix_csv(const std::string& path) { return parse_matrix_csv(read_text_file(path)); }

Mat parse_graph_csv(const std::string& text) {
    struct Edge {
        long i, j;
        double w;
    };
    std::vector<Edge> edges;
    std::stringstream ss(text);
    std::string line;
    long line_no = 0, n = 0;
    bool first = true;
    while (std::getline(ss, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        double a = 0, b = 0, w = 0;
        const bool numeric = fields.size() == 3 && parse_number(fields[0], a) && parse_number(fields[1], b) &&
                             parse_number(fields[2], w);
        if (!numeric) {
            if (first) {  // header
                first = false;
                continue;
            }
            throw ParseError("line " + std::to_string(line_no) + ": expected i,j,weight");
        }
        first = false;
        if (a < 0 || b < 0 || a != std::floor(a) || b != std::floor(b))
            throw ParseError("line " + std::to_string(line_no) + ": vertices must be nonnegative integers");
        if (a == b) throw DomainError("line " + std::to_string(line_no) + ": self loop");
        if (w < 0.0) throw DomainError("line " + std::to_string(line_no) + ": negative weight");
        edges.push_back({static_cast<long>(a), static_cast<long>(b), w});
        n = std::max({n, static_cast<long>(a) + 1, static_cast<long>(b) + 1});
    }
    if (edges.empty()) throw ParseError("graph CSV has no edges");
    Mat W = Mat::Zero(n, n);
    for (const Edge& e : edges) {
        W(e.i, e.j) += e.w;
        W(e.j, e.i) += e.w;
    }
    return W;
}

Mat read_graph_csv(const std::string& path) { return parse_graph_csv(read_text_file(path)); }

Json cut_to_json(const Vec& signs, double value) {
    std::string bits;
    for (Eigen::Index i = 0; i < signs.size(); ++i) bits.push_back(signs(i) > 0.0 ? '1' : '0');
    return {{"partition", bits}, {"value", value}};
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trace_csv(const RunTrace& trace) {
    std::string out = "iter,f_value,gap,avg_gap,bound_value,bound_satisfied,oracle_zeroth,oracle_first\n";
    for (const TraceRow& r : trace.rows) {
        out += std::to_string(r.iter) + ',' + format_double(r.f_value) + ',' + format_double(r.gap) + ',' +
               format_double(r.avg_gap) + ',' + format_double(r.bound_value) + ',' +
               (r.bound_satisfied < 0 ? "" : r.bound_satisfied ? "true" : "false") + ',' +
               std::to_string(r.oracle_zeroth) + ',' + std::to_string(r.oracle_first) + '\n';
    }
    return out;
}

std::string replicate_summary_csv(const std::vector<RunTrace>& runs, const std::vector<std::uint64_t>& seeds,
                                  const std::string& column, const std::string& curve_file) {
    if (runs.size() != seeds.size()) throw DimensionMismatch("one seed per replicate");
    std::string out = "seed,final_gap,mean_gap_curve\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::vector<double> col = runs[i].column(column);
        out += std::to_string(seeds[i]) + ',' + format_double(col.empty() ? NAN : col.back()) + ',' + curve_file +
               '\n';
    }
    return out;
}

}  // namespace convexkit
