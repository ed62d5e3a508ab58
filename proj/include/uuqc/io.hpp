#pragma once

// JSON documents shared by the command line tool.
//   matrix:  {"rows": r, "cols": c, "data": [[re, im], ...]}   row-major, r*c pairs
//   channel: {"in_dim": n, "out_dim": m, "elements": [matrix, ...]}
//   code:    {"logical_dim": d, "encoder": matrix}

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uuqc/channels.hpp"
#include "uuqc/linalg.hpp"
#include "uuqc/qec.hpp"
#include "uuqc/subspace.hpp"

namespace uuqc {

using Json = nlohmann::ordered_json;

/// Malformed document. `field` names the offending entry, e.g. "elements[1].data".
class FormatError : public InvalidArgument {
  public:
    FormatError(std::string field, const std::string &what)
        : InvalidArgument(field + ": " + what), field_(std::move(field)) {}
    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

namespace detail {

inline std::string join_field(const std::string &prefix, const std::string &name) {
    return prefix.empty() ? name : prefix + "." + name;
}

inline const Json &require(const Json &doc, const std::string &key, const std::string &prefix) {
    if (!doc.is_object()) {
        throw FormatError(prefix.empty() ? "<document>" : prefix, "expected an object");
    }
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw FormatError(join_field(prefix, key), "missing");
    }
    return *it;
}

inline std::size_t read_positive(const Json &doc, const std::string &key, const std::string &prefix) {
    const Json &v = require(doc, key, prefix);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw FormatError(join_field(prefix, key), "expected a positive integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace detail

inline Matrix matrix_from_json(const Json &doc, const std::string &prefix = "") {
    const std::size_t rows = detail::read_positive(doc, "rows", prefix);
    const std::size_t cols = detail::read_positive(doc, "cols", prefix);
    const Json &data = detail::require(doc, "data", prefix);
    const std::string field = detail::join_field(prefix, "data");
    if (!data.is_array()) {
        throw FormatError(field, "expected an array of [re, im] pairs");
    }
    if (data.size() != rows * cols) {
        throw FormatError(field, "has " + std::to_string(data.size()) + " entries, expected rows*cols = " +
                                     std::to_string(rows * cols));
    }
    Matrix m(as_index(rows), as_index(cols));
    for (std::size_t k = 0; k < data.size(); ++k) {
        const Json &e = data[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw FormatError(field + "[" + std::to_string(k) + "]", "expected [re, im]");
        }
        m(as_index(k / cols), as_index(k % cols)) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    if (!all_finite(m)) {
        throw FormatError(field, "contains non-finite values");
    }
    return m;
}

inline Json matrix_to_json(const Matrix &m) {
    Json data = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            data.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    Json doc;
    doc["rows"] = m.rows();
    doc["cols"] = m.cols();
    doc["data"] = std::move(data);
    return doc;
}

inline KrausChannel channel_from_json(const Json &doc, const std::string &prefix = "") {
    const std::size_t in_dim = detail::read_positive(doc, "in_dim", prefix);
    const std::size_t out_dim = detail::read_positive(doc, "out_dim", prefix);
    const Json &elems = detail::require(doc, "elements", prefix);
    const std::string field = detail::join_field(prefix, "elements");
    if (!elems.is_array() || elems.empty()) {
        throw FormatError(field, "expected a non-empty array of matrices");
    }
    std::vector<Matrix> ks;
    for (std::size_t k = 0; k < elems.size(); ++k) {
        const std::string ef = field + "[" + std::to_string(k) + "]";
        Matrix m = matrix_from_json(elems[k], ef);
        if (m.rows() != as_index(out_dim) || m.cols() != as_index(in_dim)) {
            throw FormatError(ef, "is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                      ", expected out_dim x in_dim = " + std::to_string(out_dim) + "x" +
                                      std::to_string(in_dim));
        }
        ks.push_back(std::move(m));
    }
    return KrausChannel(in_dim, out_dim, std::move(ks));
}

inline Json channel_to_json(const KrausChannel &ch) {
    Json doc;
    doc["in_dim"] = ch.in_dim();
    doc["out_dim"] = ch.out_dim();
    Json elems = Json::array();
    for (const auto &k : ch.elements()) {
        elems.push_back(matrix_to_json(k));
    }
    doc["elements"] = std::move(elems);
    return doc;
}

inline CodeSpec code_from_json(const Json &doc, double tol = kDefaultTolerance, const std::string &prefix = "") {
    const std::size_t d = detail::read_positive(doc, "logical_dim", prefix);
    const std::string field = detail::join_field(prefix, "encoder");
    Matrix enc = matrix_from_json(detail::require(doc, "encoder", prefix), field);
    if (enc.cols() != as_index(d)) {
        throw FormatError(field, "has " + std::to_string(enc.cols()) + " columns, expected logical_dim = " +
                                     std::to_string(d));
    }
    try {
        return CodeSpec(std::move(enc), tol);
    } catch (const InvalidArgument &e) {
        throw FormatError(field, e.what());
    }
}

inline Json code_to_json(const CodeSpec &code) {
    Json doc;
    doc["logical_dim"] = code.logical_dim();
    doc["encoder"] = matrix_to_json(code.encoder());
    return doc;
}

inline SubspaceIsometry isometry_from_json(const Json &doc, double tol = kDefaultTolerance,
                                           const std::string &prefix = "") {
    Matrix m = matrix_from_json(doc, prefix);
    try {
        return SubspaceIsometry(std::move(m), tol);
    } catch (const InvalidArgument &e) {
        throw FormatError(prefix.empty() ? "<isometry>" : prefix, e.what());
    }
}

inline Json read_json_file(const std::string &path, const std::string &field) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError(field, "cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(field, "'" + path + "' is not valid JSON (" + e.what() + ")");
    }
}

}  // namespace uuqc
