#include "mrseql/symbolic.hpp"

#include <charconv>
#include <ostream>

#include "mrseql/error.hpp"

namespace mrseql {

std::string_view to_string(Domain d) { return d == Domain::Sax ? "SAX" : "SFA"; }

Domain parse_domain(std::string_view text) {
    if (text == "SAX" || text == "sax") return Domain::Sax;
    if (text == "SFA" || text == "sfa") return Domain::Sfa;
    throw FormatError("unknown domain '" + std::string(text) + "'");
}

std::string describe(const SymbolicConfig& cfg) {
    return std::string(to_string(cfg.domain)) + "," + std::to_string(cfg.window) + "," +
           std::to_string(cfg.word_length) + "," + std::to_string(cfg.alphabet);
}

namespace {

int parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("bad integer '" + std::string(s) + "'");
    return v;
}

}  // namespace

SymbolicConfig parse_config(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(',', start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (parts.size() != 4) throw FormatError("bad config '" + std::string(text) + "'");
    return {parse_domain(parts[0]), parse_int(parts[1]), parse_int(parts[2]), parse_int(parts[3])};
}

int token_universe(const SymbolicConfig& cfg) {
    return cfg.domain == Domain::Sax ? cfg.alphabet : cfg.alphabet * cfg.word_length;
}

std::string render_token(const SymbolicConfig& cfg, Token t) {
    if (cfg.domain == Domain::Sax) return std::string(1, static_cast<char>('a' + t));
    return std::string(1, static_cast<char>('a' + t % cfg.alphabet)) + std::to_string(t / cfg.alphabet + 1);
}

std::string render_tokens(const SymbolicConfig& cfg, std::span<const Token> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (cfg.domain == Domain::Sfa && i > 0) out += kSfaTokenSeparator;
        out += render_token(cfg, tokens[i]);
    }
    return out;
}

std::vector<Token> parse_tokens(const SymbolicConfig& cfg, std::string_view text) {
    std::vector<Token> out;
    auto bad = [&] { return FormatError("token string '" + std::string(text) + "' does not fit " + describe(cfg)); };
    if (text.empty()) throw bad();
    if (cfg.domain == Domain::Sax) {
        for (char c : text) {
            int s = c - 'a';
            if (s < 0 || s >= cfg.alphabet) throw bad();
            out.push_back(s);
        }
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find(kSfaTokenSeparator, start);
        auto tok = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
        if (tok.size() < 2) throw bad();
        int s = tok[0] - 'a';
        int p = 0;
        auto digits = tok.substr(1);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
        if (ec != std::errc() || ptr != digits.data() + digits.size()) throw bad();
        if (s < 0 || s >= cfg.alphabet || p < 1 || p > cfg.word_length) throw bad();
        out.push_back((p - 1) * cfg.alphabet + s);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void write_corpus_line(std::ostream& out, const SymbolicSequence& seq, int label) {
    out << (label > 0 ? "+1" : "-1");
    for (const auto& w : seq.words) out << ' ' << render_tokens(seq.config, w);
    out << '\n';
}

void reduce_numerosity(SymbolicSequence& seq) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < seq.words.size(); ++i) {
        if (kept > 0 && seq.words[i] == seq.words[kept - 1]) continue;
        if (kept != i) {
            seq.words[kept] = std::move(seq.words[i]);
            seq.positions[kept] = seq.positions[i];
        }
        ++kept;
    }
    seq.words.resize(kept);
    seq.positions.resize(kept);
}

}  // namespace mrseql
