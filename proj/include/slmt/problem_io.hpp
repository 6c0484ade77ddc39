#pragma once

// JSON problem files.
//
//   {
//     "potential": {"type": "constant", "value": 0},
//     "interfaces": [0.0],
//     "jumps": [1.0],
//     "alpha": [1, 0],
//     "beta": [0, 1],
//     "beta_prime": [1, 0]
//   }
//
// Potential types: constant {value}, polynomial {coefficients}, sampled {x, q},
// bump {center, width, amplitude}, piecewise {pieces: [...]} with one piece
// per subinterval. Reals may be JSON numbers or decimal strings; the writer
// emits shortest round-trip decimal strings.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "slmt/hilbert.hpp"
#include "slmt/problem.hpp"

namespace slmt {

using Json = nlohmann::json;

namespace io_detail {

[[noreturn]] inline void fail(const std::string& key, const std::string& msg) {
    throw Error(ErrorCode::parse_error, "key '" + key + "': " + msg);
}

inline double real(const Json& j, const std::string& key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) fail(key, "'" + s + "' is not a decimal number");
        return v;
    }
    fail(key, "expected a number or decimal string");
}

inline std::vector<double> reals(const Json& j, const std::string& key) {
    if (!j.is_array()) fail(key, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(real(j[i], key + "[" + std::to_string(i) + "]"));
    return out;
}

inline const Json& member(const Json& obj, const std::string& name, const std::string& path) {
    auto it = obj.find(name);
    if (it == obj.end()) fail(path.empty() ? name : path + "." + name, "missing");
    return *it;
}

inline FunctionPiece piece_from_json(const Json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    std::string type = member(j, "type", path).is_string() ? j["type"].get<std::string>() : "";
    auto key = [&](const char* k) { return path + "." + k; };
    if (type == "constant") return ConstantPiece{real(member(j, "value", path), key("value"))};
    if (type == "polynomial") return PolynomialPiece{reals(member(j, "coefficients", path), key("coefficients"))};
    if (type == "sampled")
        return SampledPiece{reals(member(j, "x", path), key("x")), reals(member(j, "q", path), key("q"))};
    if (type == "bump")
        return BumpPiece{real(member(j, "center", path), key("center")), real(member(j, "width", path), key("width")),
                         real(member(j, "amplitude", path), key("amplitude"))};
    fail(key("type"), "unknown potential type '" + type + "'");
}

inline PiecewiseFunction function_from_json(const Json& j, const std::string& path) {
    if (j.is_number() || j.is_string()) return PiecewiseFunction::constant(real(j, path));
    if (j.is_object() && j.value("type", "") == "piecewise") {
        const Json& arr = member(j, "pieces", path);
        if (!arr.is_array() || arr.empty()) fail(path + ".pieces", "expected a non-empty array");
        PiecewiseFunction f;
        for (std::size_t i = 0; i < arr.size(); ++i)
            f.pieces.push_back(piece_from_json(arr[i], path + ".pieces[" + std::to_string(i) + "]"));
        return f;
    }
    return {{piece_from_json(j, path)}};
}

inline std::string format_real(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline Json reals_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(format_real(x));
    return a;
}

inline Json piece_to_json(const FunctionPiece& piece) {
    return std::visit(detail::overloaded{
                          [](const ConstantPiece& p) { return Json{{"type", "constant"}, {"value", format_real(p.value)}}; },
                          [](const PolynomialPiece& p) {
                              return Json{{"type", "polynomial"}, {"coefficients", reals_json(p.coefficients)}};
                          },
                          [](const SampledPiece& p) {
                              return Json{{"type", "sampled"}, {"x", reals_json(p.x)}, {"q", reals_json(p.q)}};
                          },
                          [](const BumpPiece& p) {
                              return Json{{"type", "bump"},
                                          {"center", format_real(p.center)},
                                          {"width", format_real(p.width)},
                                          {"amplitude", format_real(p.amplitude)}};
                          },
                      },
                      piece);
}

inline Json function_to_json(const PiecewiseFunction& f) {
    if (f.pieces.size() == 1) return piece_to_json(f.pieces.front());
    Json arr = Json::array();
    for (const auto& p : f.pieces) arr.push_back(piece_to_json(p));
    return Json{{"type", "piecewise"}, {"pieces", arr}};
}

inline std::string locate_offset(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace io_detail

inline Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::parse_error, "malformed JSON at " + io_detail::locate_offset(text, e.byte) + ": " + e.what());
    }
}

inline ProblemSpec problem_spec_from_json(const Json& j) {
    using namespace io_detail;
    if (!j.is_object()) fail("<root>", "expected an object");
    static const char* known[] = {"potential", "interfaces", "jumps", "alpha", "beta", "beta_prime", "name"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
            fail(it.key(), "unknown key");
    ProblemSpec s;
    s.potential = j.contains("potential") ? function_from_json(j["potential"], "potential")
                                          : PiecewiseFunction::constant(0.0);
    if (j.contains("interfaces")) s.interfaces = reals(j["interfaces"], "interfaces");
    if (j.contains("jumps")) s.jumps = reals(j["jumps"], "jumps");
    auto pair = [&](const char* key, std::size_t n) {
        auto v = reals(member(j, key, ""), key);
        if (v.size() != n) fail(key, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
        return v;
    };
    auto a = pair("alpha", 2);
    auto b = pair("beta", 2);
    auto bp = pair("beta_prime", 2);
    s.left_bc = {a[0], a[1]};
    s.right_bc = {b[0], b[1], bp[0], bp[1]};
    return s;
}

inline ProblemSpec parse_problem_spec(const std::string& text) { return problem_spec_from_json(parse_json_text(text)); }

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::parse_error, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ProblemSpec load_problem_spec(const std::string& path) { return parse_problem_spec(read_text_file(path)); }

inline Json problem_spec_to_json(const ProblemSpec& s) {
    using namespace io_detail;
    return Json{{"potential", function_to_json(s.potential)},
                {"interfaces", reals_json(s.interfaces)},
                {"jumps", reals_json(s.jumps)},
                {"alpha", reals_json({s.left_bc.alpha1, s.left_bc.alpha2})},
                {"beta", reals_json({s.right_bc.beta1, s.right_bc.beta2})},
                {"beta_prime", reals_json({s.right_bc.beta1_prime, s.right_bc.beta2_prime})}};
}

/// H element described as {"f": <potential-style function>, "f1": real}.
struct ElementSpec {
    PiecewiseFunction f = PiecewiseFunction::constant(0.0);
    double f1 = 0.0;
};

inline ElementSpec element_spec_from_json(const Json& j) {
    using namespace io_detail;
    if (!j.is_object()) fail("<root>", "expected an object");
    ElementSpec e;
    if (j.contains("f")) e.f = function_from_json(j["f"], "f");
    if (j.contains("f1")) e.f1 = real(j["f1"], "f1");
    return e;
}

inline HElement make_element(const Problem& problem, const ElementSpec& spec) {
    const std::size_t pieces = problem.piece_count();
    if (spec.f.pieces.size() != 1 && spec.f.pieces.size() != pieces)
        throw Error(ErrorCode::parse_error, "key 'f': need 1 or " + std::to_string(pieces) + " pieces");
    auto fn = spec.f;
    return {[fn](std::size_t j, double x) {
                return evaluate_piece(fn.pieces.size() == 1 ? fn.pieces.front() : fn.pieces[j], x);
            },
            spec.f1};
}

}  // namespace slmt
