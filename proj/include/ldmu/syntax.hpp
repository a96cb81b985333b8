#ifndef LDMU_SYNTAX_HPP_
#define LDMU_SYNTAX_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ldmu/term.hpp"
#include "ldmu/types.hpp"

namespace ldmu {

struct Pos {
  int line = 1;
  int col = 1;
  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col);
  }
};

class ParseError : public Error {
 public:
  ParseError(Pos pos, const std::string& msg)
      : Error(pos.str() + ": " + msg), pos_(pos), msg_(msg) {}
  Pos pos() const { return pos_; }
  const std::string& message() const { return msg_; }

 private:
  Pos pos_;
  std::string msg_;
};

enum class Tok {
  kIdent, kNumber, kString,
  kLParen, kRParen, kComma, kDot, kColon, kSemi,
  kDefEq,   // :=
  kArrow,   // ->
  kImp,     // =>
  kAnd,     // /\  (written with a backslash)
  kOr,      // \/
  kLambda,  // backslash
  kEnd
};

struct Token {
  Tok kind;
  std::string text;
  Pos pos;
};

// '%' starts a comment running to the end of the line.
std::vector<Token> lex(std::string_view text);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}
  const Token& peek(size_t k = 0) const;
  Token next();
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const char* word) const {
    return at(Tok::kIdent) && peek().text == word;
  }
  bool accept(Tok k);
  Token expect(Tok k, const char* what);
  void expect_ident(const char* word);
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  std::vector<Token> toks_;
  size_t i_ = 0;
};

// Untyped syntax tree produced by the parser.
struct RawTerm {
  enum class Kind { kIdent, kApp, kLam, kAll, kEx, kAnd, kOr, kImp };
  Kind kind;
  Pos pos;
  std::string name;           // ident, binder variable
  std::optional<Type> annot;  // binder annotation
  std::shared_ptr<const RawTerm> a, b;
};
using RawPtr = std::shared_ptr<const RawTerm>;

Type parse_type(TokenStream& ts, const Signature& sig);
RawPtr parse_raw_term(TokenStream& ts, const Signature& sig);

// Resolves identifiers (binders, then `ctx`, then constants) and infers the
// types of unannotated binders, of eq instances and, when `allow_new_vars`
// is set, of unknown identifiers, which become new free variables. All terms
// share one inference problem. Results are normalized.
struct Elaborated {
  std::vector<Term> terms;
  VarContext new_vars;
};
Elaborated elaborate(const Signature& sig, const VarContext& ctx,
                     const std::vector<std::pair<RawPtr, std::optional<Type>>>& items,
                     bool allow_new_vars);

// Whole-string conveniences.
Type parse_type(const Signature& sig, std::string_view text);
Term parse_term(const Signature& sig, const VarContext& ctx,
                std::string_view text, std::optional<Type> expected = {});
Term parse_formula(const Signature& sig, const VarContext& ctx,
                   std::string_view text);

// Quoting for string literals in proof files.
std::string quote(const std::string& s);

}  // namespace ldmu

#endif  // LDMU_SYNTAX_HPP_
