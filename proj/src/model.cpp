#include "cbr/model.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cbr/error.hpp"

namespace cbr {
namespace {

constexpr std::string_view kMagic = "cbr-snapshot";
constexpr int kVersion = 1;

std::string real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_reals(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ' ';
        out << real(values[i]);
    }
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next line split into whitespace-separated tokens; first token must equal key.
    std::vector<std::string> expect(std::string_view key) {
        auto tokens = next();
        if (tokens.empty() || tokens.front() != key) fail("expected '" + std::string(key) + "'");
        return tokens;
    }

    std::vector<std::string> next() {
        std::string line;
        if (!std::getline(in_, line)) fail("unexpected end of snapshot");
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        for (std::string tok; ss >> tok;) tokens.push_back(std::move(tok));
        return tokens;
    }

    double to_real(const std::string& tok) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("bad real '" + tok + "'");
        return v;
    }

    std::size_t to_size(const std::string& tok) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("bad integer '" + tok + "'");
        return v;
    }

    std::vector<double> reals(const std::vector<std::string>& tokens, std::size_t skip, std::size_t expected) {
        if (tokens.size() != skip + expected) {
            fail("expected " + std::to_string(expected) + " values, got " + std::to_string(tokens.size() - skip));
        }
        std::vector<double> out;
        out.reserve(expected);
        for (std::size_t i = skip; i < tokens.size(); ++i) out.push_back(to_real(tokens[i]));
        return out;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_no_, "snapshot: " + message); }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace

std::string_view variant_tag(const Model& model) {
    switch (model.index()) {
        case 0: return "cbr";
        case 1: return "cbr-diag";
        case 2: return "uniexp";
        default: return "pa-pair";
    }
}

std::size_t model_dim(const Model& model) {
    return std::visit(
        [](const auto& m) {
            if constexpr (requires { m.ranker; }) {
                return m.ranker.dim();
            } else {
                return m.dim();
            }
        },
        model);
}

double score(const Model& model, const Instance& x) {
    return std::visit(
        [&x](const auto& m) {
            if constexpr (requires { m.ranker; }) {
                return m.ranker.score(x);
            } else {
                return m.score(x);
            }
        },
        model);
}

void write_snapshot(std::ostream& out, const Snapshot& snap) {
    const std::size_t d = model_dim(snap.model);
    out << kMagic << ' ' << kVersion << '\n';
    out << "variant " << variant_tag(snap.model) << '\n';
    out << "dim " << d << '\n';
    std::visit(
        [&out, d](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GaussianRanker> || std::is_same_v<T, DiagGaussianRanker>) {
                out << "eta " << real(m.probit().eta) << '\n';
                out << "penalty " << real(m.penalty()) << '\n';
                out << "mean ";
                write_reals(out, m.mean());
                out << '\n';
                if constexpr (std::is_same_v<T, GaussianRanker>) {
                    out << "covariance\n";
                    for (std::size_t r = 0; r < d; ++r) {
                        write_reals(out, m.covariance().row(r));
                        out << '\n';
                    }
                } else {
                    out << "confidence ";
                    write_reals(out, m.confidence());
                    out << '\n';
                }
            } else {
                out << "mean ";
                write_reals(out, m.ranker.weights());
                out << '\n';
            }
        },
        snap.model);
    if (snap.scaling) {
        const auto& rec = *snap.scaling;
        std::size_t k = 0;
        for (bool s : rec.seen) k += s;
        out << "scaling " << k << ' ' << rec.dim() << '\n';
        for (std::size_t i = 0; i < rec.dim(); ++i) {
            if (rec.seen[i]) out << (i + 1) << ' ' << real(rec.lo[i]) << ' ' << real(rec.hi[i]) << '\n';
        }
    }
    out << "end\n";
}

Snapshot read_snapshot(std::istream& in) {
    LineReader reader(in);
    const auto header = reader.expect(kMagic);
    if (header.size() != 2 || reader.to_size(header[1]) != kVersion) reader.fail("unsupported snapshot version");
    const auto variant = reader.expect("variant");
    if (variant.size() != 2) reader.fail("variant line needs one tag");
    const auto dim_line = reader.expect("dim");
    if (dim_line.size() != 2) reader.fail("dim line needs one value");
    const std::size_t d = reader.to_size(dim_line[1]);
    const std::string& tag = variant[1];

    Snapshot snap{UniExpModel{LinearRanker(0)}, std::nullopt};
    if (tag == "cbr" || tag == "cbr-diag") {
        const auto eta_line = reader.expect("eta");
        const auto pen_line = reader.expect("penalty");
        if (eta_line.size() != 2 || pen_line.size() != 2) reader.fail("eta/penalty lines need one value");
        const auto probit = ProbitParams::from_eta(reader.to_real(eta_line[1]));
        const double penalty = reader.to_real(pen_line[1]);
        auto mean = reader.reals(reader.expect("mean"), 1, d);
        if (tag == "cbr") {
            reader.expect("covariance");
            DenseMatrix cov(d);
            for (std::size_t r = 0; r < d; ++r) {
                const auto row = reader.reals(reader.next(), 0, d);
                std::copy(row.begin(), row.end(), cov.row(r).begin());
            }
            snap.model = GaussianRanker(std::move(mean), std::move(cov), probit, penalty);
        } else {
            auto conf = reader.reals(reader.expect("confidence"), 1, d);
            snap.model = DiagGaussianRanker(std::move(mean), std::move(conf), probit, penalty);
        }
    } else if (tag == "uniexp" || tag == "pa-pair") {
        LinearRanker ranker(reader.reals(reader.expect("mean"), 1, d));
        if (tag == "uniexp") {
            snap.model = UniExpModel{std::move(ranker)};
        } else {
            snap.model = PaPairModel{std::move(ranker)};
        }
    } else {
        reader.fail("unknown variant '" + tag + "'");
    }

    auto tokens = reader.next();
    if (!tokens.empty() && tokens.front() == "scaling") {
        if (tokens.size() != 3) reader.fail("scaling line needs count and dimension");
        const std::size_t k = reader.to_size(tokens[1]);
        const std::size_t sdim = reader.to_size(tokens[2]);
        ScalingRecord rec{std::vector<double>(sdim, 0.0), std::vector<double>(sdim, 0.0), std::vector<bool>(sdim, false)};
        for (std::size_t i = 0; i < k; ++i) {
            const auto row = reader.next();
            if (row.size() != 3) reader.fail("scaling entry needs index, min, max");
            const std::size_t idx = reader.to_size(row[0]);
            if (idx == 0 || idx > sdim) reader.fail("scaling index out of range");
            rec.lo[idx - 1] = reader.to_real(row[1]);
            rec.hi[idx - 1] = reader.to_real(row[2]);
            rec.seen[idx - 1] = true;
        }
        snap.scaling = std::move(rec);
        tokens = reader.next();
    }
    if (tokens.size() != 1 || tokens.front() != "end") reader.fail("expected 'end'");
    return snap;
}

void save_snapshot(const std::string& path, const Snapshot& snapshot) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write snapshot '" + path + "'");
    write_snapshot(out, snapshot);
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open snapshot '" + path + "'");
    return read_snapshot(in);
}

}  // namespace cbr
