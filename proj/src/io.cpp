#include "nearcomm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nearcomm/errors.hpp"

namespace nearcomm {

namespace {

using nlohmann::json;

void append17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

json parse_or_throw(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(std::string(what) + ": not valid JSON");
    return j;
}

double number_field(const json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j[key].is_number())
        throw ParseError(std::string(what) + ": missing numeric field \"" + key + "\"");
    return j[key].get<double>();
}

// n x n nested array of finite numbers
void read_plane(const json& j, const char* key, int n, std::vector<double>& out, const char* what) {
    if (!j.contains(key) || !j[key].is_array() || (int)j[key].size() != n)
        throw ParseError(std::string(what) + ": \"" + key + "\" must be an array of " +
                         std::to_string(n) + " rows");
    out.resize((size_t)n * n);
    for (int i = 0; i < n; ++i) {
        const json& row = j[key][i];
        if (!row.is_array() || (int)row.size() != n)
            throw ParseError(std::string(what) + ": \"" + key + "\" row " + std::to_string(i) +
                             " must hold " + std::to_string(n) + " numbers");
        for (int k = 0; k < n; ++k) {
            if (!row[k].is_number())
                throw ParseError(std::string(what) + ": \"" + key + "\"[" + std::to_string(i) +
                                 "][" + std::to_string(k) + "] is not a number");
            double v = row[k].get<double>();
            if (!std::isfinite(v))
                throw ParseError(std::string(what) + ": \"" + key + "\"[" + std::to_string(i) +
                                 "][" + std::to_string(k) + "] is not finite");
            out[(size_t)i * n + k] = v;
        }
    }
}

}  // namespace

std::string matrix_to_json(const Matrix& m) {
    const int n = m.dim();
    std::string out = "{\"dim\": " + std::to_string(n) + ",\n\"re\": [";
    for (int i = 0; i < n; ++i) {
        out += i == 0 ? "[" : " [";
        for (int j = 0; j < n; ++j) {
            append17(out, m(i, j).real());
            if (j + 1 < n) out += ", ";
        }
        out += i + 1 < n ? "],\n" : "]";
    }
    out += "],\n\"im\": [";
    for (int i = 0; i < n; ++i) {
        out += i == 0 ? "[" : " [";
        for (int j = 0; j < n; ++j) {
            append17(out, m(i, j).imag());
            if (j + 1 < n) out += ", ";
        }
        out += i + 1 < n ? "],\n" : "]";
    }
    out += "]}\n";
    return out;
}

Matrix matrix_from_json(const std::string& text) {
    json j = parse_or_throw(text, "matrix");
    if (!j.is_object()) throw ParseError("matrix: top level must be an object");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw ParseError("matrix: missing integer field \"dim\"");
    int n = j["dim"].get<int>();
    if (n < 1 || n > 4096) throw ParseError("matrix: dim out of range");
    std::vector<double> re, im;
    read_plane(j, "re", n, re, "matrix");
    read_plane(j, "im", n, im, "matrix");
    Matrix m(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            m(i, k) = cplx(re[(size_t)i * n + k], im[(size_t)i * n + k]);
    return m;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path);
    f << content;
    if (!f) throw Error("write failed: " + path);
}

Matrix read_matrix_file(const std::string& path) {
    try {
        return matrix_from_json(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_matrix_file(const std::string& path, const Matrix& m) {
    write_text_file(path, matrix_to_json(m));
}

std::string certificate_to_json(const ApproxCertificate& cert) {
    std::string out = "{\n";
    auto field = [&](const char* key, double v, bool last = false) {
        out += "  \"";
        out += key;
        out += "\": ";
        append17(out, v);
        out += last ? "\n" : ",\n";
    };
    field("eps", cert.eps);
    field("delta_eps", cert.delta_eps);
    field("dX", cert.dX);
    field("dOmega", cert.dOmega);
    field("residual", cert.residual);
    field("bound_dX", cert.bound_dX);
    field("bound_dOmega", cert.bound_dOmega);
    field("C", cert.C);
    field("scale_factor", cert.scale_factor);
    out += "  \"params\": {\"delta_exp\": ";
    append17(out, cert.params.delta_exp);
    out += ", \"beta_exp\": ";
    append17(out, cert.params.beta_exp);
    out += "}\n}\n";
    return out;
}

ApproxCertificate certificate_from_json(const std::string& text) {
    json j = parse_or_throw(text, "certificate");
    if (!j.is_object()) throw ParseError("certificate: top level must be an object");
    ApproxCertificate cert;
    cert.eps = number_field(j, "eps", "certificate");
    cert.delta_eps = number_field(j, "delta_eps", "certificate");
    cert.dX = number_field(j, "dX", "certificate");
    cert.dOmega = number_field(j, "dOmega", "certificate");
    cert.residual = number_field(j, "residual", "certificate");
    cert.bound_dX = number_field(j, "bound_dX", "certificate");
    cert.bound_dOmega = number_field(j, "bound_dOmega", "certificate");
    cert.C = number_field(j, "C", "certificate");
    cert.scale_factor = number_field(j, "scale_factor", "certificate");
    if (!j.contains("params") || !j["params"].is_object())
        throw ParseError("certificate: missing object field \"params\"");
    cert.params.eps = cert.eps;
    cert.params.delta_exp = number_field(j["params"], "delta_exp", "certificate params");
    cert.params.beta_exp = number_field(j["params"], "beta_exp", "certificate params");
    cert.eps_measured = cert.eps;
    return cert;
}

}  // namespace nearcomm
