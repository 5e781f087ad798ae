#include "glai/persistence.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glai/errors.hpp"

namespace glai {

namespace {

constexpr const char* kMagic = "GLAI/1";

void render(std::string& out, double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, r.ptr);
}

void write_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw input_error("cannot write " + tmp);
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw input_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw input_error("cannot rename " + tmp + " to " + path);
    }
}

std::string header(const char* kind, const NetworkSpec& spec) {
    std::string out = std::string(kMagic) + " " + kind + "\n";
    out += "spec";
    for (std::size_t s : spec.layer_sizes) out += " " + std::to_string(s);
    out += "\nseed " + std::to_string(spec.seed) + "\n";
    return out;
}

// Line reader that tracks line numbers for error reporting.
struct Reader {
    std::ifstream in;
    std::string path;
    std::size_t line_no = 0;
    std::string line;

    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw input_error("cannot open " + p);
    }

    bool next() {
        if (!std::getline(in, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw format_error(path + ":" + std::to_string(line_no) + ": " + msg);
    }

    std::string expect_line(const std::string& what) {
        if (!next()) {
            ++line_no;
            fail("unexpected end of file, expected " + what);
        }
        return line;
    }
};

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

double parse_double(Reader& r, const std::string& tok) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        r.fail("bad number '" + tok + "'");
    }
    return v;
}

std::uint64_t parse_u64(Reader& r, const std::string& tok) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        r.fail("bad integer '" + tok + "'");
    }
    return v;
}

std::string read_kind(Reader& r) {
    auto t = tokens(r.expect_line("magic line"));
    if (t.size() != 2 || t[0] != kMagic) {
        if (!t.empty() && t[0].rfind("GLAI/", 0) == 0) {
            throw version_error(r.path + ":1: unsupported format version '" + t[0] + "'");
        }
        r.fail("not a GLAI/1 file");
    }
    return t[1];
}

void read_kind_checked(Reader& r, const std::string& want) {
    std::string kind = read_kind(r);
    if (kind != want) r.fail("expected kind '" + want + "', found '" + kind + "'");
}

NetworkSpec read_spec(Reader& r) {
    NetworkSpec spec;
    auto t = tokens(r.expect_line("spec line"));
    if (t.size() < 4 || t[0] != "spec") r.fail("expected 'spec <sizes...>'");
    for (std::size_t i = 1; i < t.size(); ++i) {
        spec.layer_sizes.push_back(parse_u64(r, t[i]));
    }
    auto s = tokens(r.expect_line("seed line"));
    if (s.size() != 2 || s[0] != "seed") r.fail("expected 'seed <u64>'");
    spec.seed = parse_u64(r, s[1]);
    try {
        spec.validate();
    } catch (const config_error& e) {
        r.fail(e.what());
    }
    return spec;
}

}  // namespace

ModelKind peek_kind(const std::string& path) {
    Reader r(path);
    std::string kind = read_kind(r);
    if (kind == "network") return ModelKind::Network;
    if (kind == "patterns") return ModelKind::Patterns;
    if (kind == "estimator") return ModelKind::Estimator;
    r.fail("unknown kind '" + kind + "'");
}

void save(const Network& net, const std::string& path) {
    std::string out = header("network", net.spec);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const Matrix& w = net.weights[l];
        out += "weights " + std::to_string(l) + " " + std::to_string(w.rows) + " " +
               std::to_string(w.cols) + "\n";
        for (std::size_t i = 0; i < w.rows; ++i) {
            for (std::size_t j = 0; j < w.cols; ++j) {
                if (j > 0) out += ' ';
                render(out, w(i, j));
            }
            out += '\n';
        }
        out += "biases " + std::to_string(l) + " " + std::to_string(net.biases[l].size()) +
               "\n";
        for (std::size_t j = 0; j < net.biases[l].size(); ++j) {
            if (j > 0) out += ' ';
            render(out, net.biases[l][j]);
        }
        out += '\n';
    }
    write_atomic(path, out);
}

Network load_network(const std::string& path) {
    Reader r(path);
    read_kind_checked(r, "network");
    NetworkSpec spec = read_spec(r);
    Network net;
    net.spec = spec;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        std::size_t rows = spec.layer_sizes[l + 1];
        std::size_t cols = spec.layer_sizes[l];
        auto t = tokens(r.expect_line("weights section"));
        if (t.size() != 4 || t[0] != "weights") r.fail("expected 'weights l r c'");
        if (parse_u64(r, t[1]) != l || parse_u64(r, t[2]) != rows ||
            parse_u64(r, t[3]) != cols) {
            r.fail("weights section does not match spec (layer " + std::to_string(l) + ")");
        }
        Matrix w(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            if (!r.next()) {
                ++r.line_no;
                r.fail("truncated weights block: expected " + std::to_string(rows) +
                       " rows, found " + std::to_string(i));
            }
            auto vals = tokens(r.line);
            if (vals.size() != cols) {
                r.fail("expected " + std::to_string(cols) + " values, found " +
                       std::to_string(vals.size()));
            }
            for (std::size_t j = 0; j < cols; ++j) w(i, j) = parse_double(r, vals[j]);
        }
        net.weights.push_back(std::move(w));

        auto bt = tokens(r.expect_line("biases section"));
        if (bt.size() != 3 || bt[0] != "biases" || parse_u64(r, bt[1]) != l ||
            parse_u64(r, bt[2]) != rows) {
            r.fail("expected 'biases " + std::to_string(l) + " " + std::to_string(rows) + "'");
        }
        auto vals = tokens(r.expect_line("bias values"));
        if (vals.size() != rows) {
            r.fail("expected " + std::to_string(rows) + " bias values, found " +
                   std::to_string(vals.size()));
        }
        std::vector<double> b(rows);
        for (std::size_t j = 0; j < rows; ++j) b[j] = parse_double(r, vals[j]);
        net.biases.push_back(std::move(b));
    }
    return net;
}

void save(const PatternSet& ps, const std::string& path) {
    std::string out = header("patterns", ps.spec);
    out += "masks " + std::to_string(ps.size()) + "\n";
    for (const ActivationPattern& p : ps.patterns) {
        for (const auto& layer : p.masks) {
            for (std::uint8_t bit : layer) out += bit ? '1' : '0';
            out += '\n';
        }
    }
    write_atomic(path, out);
}

PatternSet load_patterns(const std::string& path) {
    Reader r(path);
    read_kind_checked(r, "patterns");
    PatternSet ps;
    ps.spec = read_spec(r);
    auto t = tokens(r.expect_line("masks section"));
    if (t.size() != 2 || t[0] != "masks") r.fail("expected 'masks n'");
    std::size_t n = parse_u64(r, t[1]);
    ps.patterns.resize(n);
    std::size_t hidden = ps.spec.hidden_layers();
    for (std::size_t i = 0; i < n; ++i) {
        ActivationPattern& p = ps.patterns[i];
        p.masks.resize(hidden);
        for (std::size_t l = 0; l < hidden; ++l) {
            std::string line = r.expect_line("mask line");
            std::size_t want = ps.spec.layer_sizes[l + 1];
            if (line.size() != want) {
                r.fail("mask width " + std::to_string(line.size()) + " != layer size " +
                       std::to_string(want));
            }
            p.masks[l].resize(want);
            for (std::size_t j = 0; j < want; ++j) {
                if (line[j] != '0' && line[j] != '1') r.fail("mask bits must be 0 or 1");
                p.masks[l][j] = line[j] == '1';
            }
        }
    }
    return ps;
}

void save(const LinearEstimator& est, const std::string& path) {
    std::string out = header("estimator", est.table.spec);
    out += "pw " + std::to_string(est.pw.size()) + "\n";
    for (double v : est.pw) {
        render(out, v);
        out += '\n';
    }
    write_atomic(path, out);
}

LinearEstimator load_estimator(const std::string& path) {
    Reader r(path);
    read_kind_checked(r, "estimator");
    NetworkSpec spec = read_spec(r);
    LinearEstimator est;
    est.table = enumerate_paths(spec);
    auto t = tokens(r.expect_line("pw section"));
    if (t.size() != 2 || t[0] != "pw") r.fail("expected 'pw n'");
    std::size_t n = parse_u64(r, t[1]);
    if (n != est.table.size()) {
        r.fail("pw count " + std::to_string(n) + " does not match path count " +
               std::to_string(est.table.size()));
    }
    est.pw.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto vals = tokens(r.expect_line("pw value"));
        if (vals.size() != 1) r.fail("expected one value per pw line");
        est.pw[i] = parse_double(r, vals[0]);
    }
    return est;
}

}  // namespace glai
