#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "convexkit/interior_point.hpp"
#include "convexkit/linalg.hpp"
#include "convexkit/trace.hpp"

namespace convexkit {

using Json = nlohmann::json;

// Matrices are row-major arrays of rows; vectors plain arrays. Throws
// ParseError on ragged or non-numeric input.
Mat matrix_from_json(const Json& j);
Vec vector_from_json(const Json& j);
Json matrix_to_json(const Mat& A);
Json vector_to_json(const Vec& v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
// Throws ParseError with the parser's message for malformed documents.
Json parse_json(const std::string& text, const std::string& source = "input");
Json read_json_file(const std::string& path);

// {"A": [[...]], "b": [...], "c": [...]} with optional "A_eq", "b_eq" for
// A x >= b, A_eq x = b_eq.
LinearProgram lp_from_json(const Json& j);
// x, value and the certificate {t_final, gap_bound}.
Json lp_result_to_json(const LpResult& r);

// Plain float CSV, one matrix row per line. Blank lines are skipped.
Mat read_matrix_csv(const std::string& path);
Mat parse_matrix_csv(const std::string& text);

// Edge list "i,j,weight" with 0-based vertices and an optional header line;
// returns the symmetric weight matrix. Throws ParseError for malformed lines
// and DomainError for negative weights or self loops.
Mat parse_graph_csv(const std::string& text);
Mat read_graph_csv(const std::string& path);

// {"partition": bitstring with '1' where the sign is +1, "value": v}.
Json cut_to_json(const Vec& signs, double value);

// Header iter,f_value,gap,avg_gap,bound_value,bound_satisfied,oracle_zeroth,
// oracle_first; doubles printed with 17 significant digits, unchecked rows
// leave bound_satisfied empty.
std::string trace_csv(const RunTrace& trace);

// seed,final_gap,mean_gap_curve: one row per replicate with the final value
// of column and the file holding the mean curve.
std::string replicate_summary_csv(const std::vector<RunTrace>& runs, const std::vector<std::uint64_t>& seeds,
                                  const std::string& column, const std::string& curve_file);

std::string format_double(double v);

}  // namespace convexkit
