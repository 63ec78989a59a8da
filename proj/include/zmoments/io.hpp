#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <json.hpp>

#include "coeffs.hpp"
#include "meanvalue.hpp"
#include "zeros.hpp"

namespace zmoments {

struct FormatError : Error {
    using Error::Error;
};

namespace io {

// ---------------------------------------------------------------------------
// files

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FormatError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// write to a sibling temporary, then rename over the target
inline void write_atomic(const std::filesystem::path& p, const std::string& content) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    auto tmp = p;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw FormatError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, p, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw FormatError("cannot rename into " + p.string() + ": " + ec.message());
    }
}

// Exclusive advisory lock on <path>.lock for the lifetime of the object.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& target) : path_(target) {
        path_ += ".lock";
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) throw FormatError("cannot open lock file " + path_.string());
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            throw FormatError("another process holds " + path_.string());
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

// ---------------------------------------------------------------------------
// numbers

// enough digits to reproduce a long double exactly
inline std::string fmt(real x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.21Lg", x);
    return buf;
}

inline real parse_real(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        real v = std::stold(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(where + ": not a number: '" + s + "'");
    }
}

// key=value tokens of a "# kind k=v k=v" header
inline std::map<std::string, std::string> parse_header(const std::string& line, const std::string& kind,
                                                       const std::string& where) {
    std::istringstream ss(line);
    std::string hash, k;
    ss >> hash >> k;
    if (hash != "#" || k != kind) throw FormatError(where + ": expected header '# " + kind + " ...'");
    std::map<std::string, std::string> kv;
    std::string tok;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw FormatError(where + ": malformed header field '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

// ---------------------------------------------------------------------------
// zero cache

inline constexpr real zero_cache_quantum = 5e-13L;  // half-unit of the 12th decimal

inline std::string zeros_to_text(const ZeroList& z) {
    std::ostringstream out;
    out << "# zeros T=" << fmt(z.T) << " abs_error=" << fmt(z.abs_error)
        << " certified=" << (z.certified ? "true" : "false") << "\n";
    char buf[64];
    for (real g : z.gammas) {
        std::snprintf(buf, sizeof buf, "%.12Lf\n", g);
        out << buf;
    }
    return out.str();
}

// Validating parser; errors name the offending line. The header's abs_error is
// widened by the 12-decimal rounding of the stored ordinates.
inline ZeroList zeros_from_text(const std::string& text, const std::string& name = "zero cache") {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(name + ":1: empty file");
    auto kv = parse_header(line, "zeros", name + ":1");
    for (auto key : {"T", "abs_error", "certified"})
        if (!kv.count(key)) throw FormatError(name + ":1: header lacks " + std::string(key));
    ZeroList z;
    z.T = parse_real(kv["T"], name + ":1");
    z.abs_error = parse_real(kv["abs_error"], name + ":1") + zero_cache_quantum;
    if (kv["certified"] != "true" && kv["certified"] != "false")
        throw FormatError(name + ":1: certified must be true or false");
    z.certified = kv["certified"] == "true";
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = name + ":" + std::to_string(lineno);
        if (line.empty()) throw FormatError(where + ": empty line");
        real g = parse_real(line, where);
        if (!(g > 0) || !(g < z.T)) throw FormatError(where + ": ordinate outside (0, T)");
        if (!z.gammas.empty() && !(g > z.gammas.back())) throw FormatError(where + ": ordinates not increasing");
        z.gammas.push_back(g);
    }
    return z;
}

inline void save_zeros(const std::filesystem::path& p, const ZeroList& z) { write_atomic(p, zeros_to_text(z)); }
inline ZeroList load_zeros(const std::filesystem::path& p) { return zeros_from_text(read_file(p), p.string()); }

// ---------------------------------------------------------------------------
// coefficient vectors

inline std::string coeffs_to_text(const CoefficientVector& c) {
    std::ostringstream out;
    out << "# coeffs label=" << (c.label().empty() ? "unnamed" : c.label()) << " M=" << c.M() << "\n";
    for (auto& [n, v] : c.nonzeros()) out << n << " " << fmt(v) << "\n";
    return out.str();
}

inline CoefficientVector coeffs_from_text(const std::string& text, const std::string& name = "coefficients") {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(name + ":1: empty file");
    auto kv = parse_header(line, "coeffs", name + ":1");
    if (!kv.count("M") || !kv.count("label")) throw FormatError(name + ":1: header needs label and M");
    std::uint64_t M = 0;
    try {
        M = std::stoull(kv["M"]);
    } catch (const std::exception&) {
        throw FormatError(name + ":1: bad M");
    }
    std::vector<std::pair<std::uint64_t, real>> e;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = name + ":" + std::to_string(lineno);
        std::istringstream ls(line);
        std::string n, v, extra;
        if (!(ls >> n >> v) || (ls >> extra)) throw FormatError(where + ": expected 'n value'");
        std::uint64_t idx = 0;
        try {
            idx = std::stoull(n);
        } catch (const std::exception&) {
            throw FormatError(where + ": bad index");
        }
        e.push_back({idx, parse_real(v, where)});
    }
    try {
        return CoefficientVector(M, std::move(e), kv["label"]);
    } catch (const DomainError& err) {
        throw FormatError(name + ": " + err.what());
    }
}

// ---------------------------------------------------------------------------
// constants record

inline std::string poly_to_text(const Polynomial& p) {
    std::string s;
    for (std::size_t i = 0; i < p.c.size(); ++i) s += (i ? "," : "") + fmt(p.c[i]);
    return s;
}

inline std::string constants_to_text(const MainTermConstants& K) {
    std::ostringstream out;
    out << "# constants\n";
    out << "source=" << K.source << "\n";
    out << "alpha2_form=" << to_string(K.alpha2_form) << "\n";
    for (auto [k, v] : std::initializer_list<std::pair<const char*, real>>{
             {"gamma0", K.gamma0}, {"gamma1", K.gamma1}, {"gamma2", K.gamma2}, {"a1", K.a1}, {"a2", K.a2},
             {"C0", K.C0}, {"C1", K.C1}, {"D", K.D}})
        out << k << "=" << fmt(v) << "\n";
    out << "p1=" << poly_to_text(K.p1) << "\np2=" << poly_to_text(K.p2) << "\nr1_poly=" << poly_to_text(K.r1_poly)
        << "\nr1_tilde=" << poly_to_text(K.r1_tilde) << "\nr2=" << poly_to_text(K.r2) << "\n";
    for (auto& [k, v] : K.diagnostics) out << "diag." << k << "=" << fmt(v) << "\n";
    return out.str();
}

inline MainTermConstants constants_from_text(const std::string& text, const std::string& name = "constants") {
    std::istringstream in(text);
    std::string line;
    MainTermConstants K;
    int lineno = 0;
    auto poly = [&](const std::string& v, const std::string& where) {
        std::vector<real> c;
        std::istringstream ss(v);
        std::string tok;
        while (std::getline(ss, tok, ',')) c.push_back(parse_real(tok, where));
        return Polynomial(std::move(c));
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::string where = name + ":" + std::to_string(lineno);
        auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError(where + ": expected key=value");
        std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "source") K.source = v;
        else if (k == "alpha2_form") {
            if (v != "residue" && v != "closed_form") throw FormatError(where + ": alpha2_form must be residue or closed_form");
            K.alpha2_form = v == "residue" ? Alpha2Form::residue : Alpha2Form::closed_form;
        }
        else if (k == "gamma0") K.gamma0 = parse_real(v, where);
        else if (k == "gamma1") K.gamma1 = parse_real(v, where);
        else if (k == "gamma2") K.gamma2 = parse_real(v, where);
        else if (k == "a1") K.a1 = parse_real(v, where);
        else if (k == "a2") K.a2 = parse_real(v, where);
        else if (k == "C0") K.C0 = parse_real(v, where);
        else if (k == "C1") K.C1 = parse_real(v, where);
        else if (k == "D") K.D = parse_real(v, where);
        else if (k == "p1") K.p1 = poly(v, where);
        else if (k == "p2") K.p2 = poly(v, where);
        else if (k == "r1_poly") K.r1_poly = poly(v, where);
        else if (k == "r1_tilde") K.r1_tilde = poly(v, where);
        else if (k == "r2") K.r2 = poly(v, where);
        else if (k.rfind("diag.", 0) == 0) K.diagnostics[k.substr(5)] = parse_real(v, where);
        else throw FormatError(where + ": unknown key '" + k + "'");
    }
    try {
        K.require();
    } catch (const DomainError& e) {
        throw FormatError(name + ": incomplete constants record (" + e.what() + ")");
    }
    return K;
}

inline void save_constants(const std::filesystem::path& p, const MainTermConstants& K) {
    write_atomic(p, constants_to_text(K));
}

inline MainTermConstants load_constants(const std::filesystem::path& p) {
    if (!std::filesystem::exists(p))
        throw FormatError("constants file " + p.string() +
                          " not found; run `zmoments calibrate --out " + p.string() + "` first");
    return constants_from_text(read_file(p), p.string());
}

// ---------------------------------------------------------------------------
// comparison reports

inline nlohmann::ordered_json report_to_json(const ComparisonReport& r) {
    using J = nlohmann::ordered_json;
    J j;
    j["kind"] = r.kind;
    J meta = J::object();
    for (auto& [k, v] : r.metadata) meta[k] = v;
    j["metadata"] = meta;
    J rows = J::array();
    for (auto& row : r.rows) {
        J o;
        J params = J::object();
        for (auto& [k, v] : row.params) params[k] = static_cast<double>(v);
        o["params"] = params;
        o["direct_re"] = static_cast<double>(row.direct.real());
        o["direct_im"] = static_cast<double>(row.direct.imag());
        o["main"] = static_cast<double>(row.main);
        o["abs_error"] = static_cast<double>(row.abs_error);
        o["rel_error"] = static_cast<double>(row.rel_error);
        J extra = J::object();
        for (auto& [k, v] : row.extra) extra[k] = static_cast<double>(v);
        o["extra"] = extra;
        rows.push_back(o);
    }
    j["rows"] = rows;
    return j;
}

inline ComparisonReport report_from_json(const nlohmann::ordered_json& j) {
    ComparisonReport r;
    try {
        r.kind = j.at("kind").get<std::string>();
        for (auto& [k, v] : j.at("metadata").items()) r.metadata.push_back({k, v.get<std::string>()});
        for (auto& o : j.at("rows")) {
            ComparisonRow row;
            for (auto& [k, v] : o.at("params").items()) row.params.push_back({k, v.get<double>()});
            row.direct = cplx(o.at("direct_re").get<double>(), o.at("direct_im").get<double>());
            row.main = o.at("main").get<double>();
            row.abs_error = o.at("abs_error").get<double>();
            row.rel_error = o.at("rel_error").get<double>();
            for (auto& [k, v] : o.at("extra").items()) row.extra.push_back({k, v.get<double>()});
            r.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed report: ") + e.what());
    }
    return r;
}

// aligned columns: params, Re direct, Im direct, main, abs, rel
inline std::string report_to_table(const ComparisonReport& r) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> head;
    if (!r.rows.empty())
        for (auto& [k, v] : r.rows[0].params) head.push_back(k);
    for (auto h : {"re_direct", "im_direct", "main", "abs_error", "rel_error"}) head.push_back(h);
    cells.push_back(head);
    char buf[64];
    auto num = [&](real v, const char* f) {
        std::snprintf(buf, sizeof buf, f, static_cast<double>(v));
        return std::string(buf);
    };
    for (auto& row : r.rows) {
        std::vector<std::string> c;
        for (auto& [k, v] : row.params) c.push_back(num(v, "%.10g"));
        c.push_back(num(row.direct.real(), "%.10g"));
        c.push_back(num(row.direct.imag(), "%.6g"));
        c.push_back(num(row.main, "%.10g"));
        c.push_back(num(row.abs_error, "%.4e"));
        c.push_back(num(row.rel_error, "%.4e"));
        cells.push_back(std::move(c));
    }
    std::vector<std::size_t> w(head.size(), 0);
    for (auto& c : cells)
        for (std::size_t i = 0; i < c.size() && i < w.size(); ++i) w[i] = std::max(w[i], c[i].size());
    std::ostringstream out;
    for (auto& [k, v] : r.metadata) out << "# " << k << ": " << v << "\n";
    for (auto& c : cells) {
        for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "  " : "") << std::setw(static_cast<int>(w[i])) << c[i];
        out << "\n";
    }
    return out.str();
}

inline void save_report(const std::filesystem::path& stem, const ComparisonReport& r) {
    write_atomic(std::filesystem::path(stem.string() + ".json"), report_to_json(r).dump(2) + "\n");
    write_atomic(std::filesystem::path(stem.string() + ".txt"), report_to_table(r));
}

}  // namespace io
}  // namespace zmoments
