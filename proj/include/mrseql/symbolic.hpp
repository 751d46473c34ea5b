#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrseql {

enum class Domain : std::uint8_t { Sax, Sfa };

std::string_view to_string(Domain d);
Domain parse_domain(std::string_view text);

/// A transform recipe: domain, window length l, word length w, alphabet size.
struct SymbolicConfig {
    Domain domain = Domain::Sax;
    int window = 0;
    int word_length = 0;
    int alphabet = 0;

    auto operator<=>(const SymbolicConfig&) const = default;
};

/// "SAX,20,16,4"
std::string describe(const SymbolicConfig& cfg);
SymbolicConfig parse_config(std::string_view text);

/// Symbol ids. SAX tokens are the interval index (0 = 'a'). SFA tokens carry
/// their position: id = position * alphabet + symbol, so the token universe of
/// an SFA config has word_length * alphabet entries.
using Token = std::int32_t;
using Word = std::vector<Token>;

/// Separator between SFA tokens inside a word ("d1.a2.b3.b4").
inline constexpr char kSfaTokenSeparator = '.';

/// Number of distinct token ids a config can emit.
int token_universe(const SymbolicConfig& cfg);

std::string render_token(const SymbolicConfig& cfg, Token t);
/// Renders a word or a sub-word: "abba" for SAX, "a2.b3" for SFA.
std::string render_tokens(const SymbolicConfig& cfg, std::span<const Token> tokens);
/// Inverse of render_tokens. Throws FormatError on symbols outside the config.
std::vector<Token> parse_tokens(const SymbolicConfig& cfg, std::string_view text);

/// Output of a sliding-window transform of one series.
struct SymbolicSequence {
    SymbolicConfig config;
    std::vector<Word> words;
    /// Window start of each word in the raw series.
    std::vector<std::size_t> positions;
};

/// One line of the sequence-learner corpus format: "+1 abba abbc".
void write_corpus_line(std::ostream& out, const SymbolicSequence& seq, int label);

/// Collapses runs of identical consecutive words, keeping the first position.
void reduce_numerosity(SymbolicSequence& seq);

}  // namespace mrseql
