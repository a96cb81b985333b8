#include "ldmu/syntax.hpp"

#include <cctype>
#include <functional>
#include <map>

namespace ldmu {

// ---------------------------------------------------------------------------
// Lexer

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  Pos pos;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.col = 1;
      } else {
        ++pos.col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Pos start = pos;
    auto two = [&](const char* s) {
      return i + 1 < text.size() && text[i] == s[0] && text[i + 1] == s[1];
    };
    if (ident_start(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      out.push_back({Tok::kIdent, std::string(text.substr(i, j - i)), start});
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::kNumber, std::string(text.substr(i, j - i)), start});
      advance(j - i);
    } else if (c == '"') {
      std::string s;
      advance(1);
      while (true) {
        if (i >= text.size()) throw ParseError(start, "unterminated string");
        char d = text[i];
        if (d == '"') {
          advance(1);
          break;
        }
        if (d == '\\' && i + 1 < text.size() &&
            (text[i + 1] == '"' || text[i + 1] == '\\')) {
          advance(1);
          d = text[i];
        }
        s += d;
        advance(1);
      }
      out.push_back({Tok::kString, s, start});
    } else if (two(":=")) {
      out.push_back({Tok::kDefEq, ":=", start});
      advance(2);
    } else if (two("->")) {
      out.push_back({Tok::kArrow, "->", start});
      advance(2);
    } else if (two("=>")) {
      out.push_back({Tok::kImp, "=>", start});
      advance(2);
    } else if (two("/\\")) {
      out.push_back({Tok::kAnd, "/\\", start});
      advance(2);
    } else if (two("\\/")) {
      out.push_back({Tok::kOr, "\\/", start});
      advance(2);
    } else {
      Tok k;
      switch (c) {
        case '(': k = Tok::kLParen; break;
        case ')': k = Tok::kRParen; break;
        case ',': k = Tok::kComma; break;
        case '.': k = Tok::kDot; break;
        case ':': k = Tok::kColon; break;
        case ';': k = Tok::kSemi; break;
        case '\\': k = Tok::kLambda; break;
        default:
          throw ParseError(start, std::string("unexpected character '") + c + "'");
      }
      out.push_back({k, std::string(1, c), start});
      advance(1);
    }
  }
  out.push_back({Tok::kEnd, "", pos});
  return out;
}

const Token& TokenStream::peek(size_t k) const {
  size_t j = std::min(i_ + k, toks_.size() - 1);
  return toks_[j];
}

Token TokenStream::next() {
  Token t = peek();
  if (i_ + 1 < toks_.size()) ++i_;
  return t;
}

bool TokenStream::accept(Tok k) {
  if (!at(k)) return false;
  next();
  return true;
}

void TokenStream::fail(const std::string& msg) const {
  const Token& t = peek();
  std::string found = t.kind == Tok::kEnd ? "end of input" : "'" + t.text + "'";
  throw ParseError(t.pos, msg + ", found " + found);
}

Token TokenStream::expect(Tok k, const char* what) {
  if (!at(k)) fail(std::string("expected ") + what);
  return next();
}

void TokenStream::expect_ident(const char* word) {
  if (!at_ident(word)) fail(std::string("expected '") + word + "'");
  next();
}

// ---------------------------------------------------------------------------
// Parser

Type parse_type(TokenStream& ts, const Signature& sig) {
  Type left = Type::prop();
  if (ts.accept(Tok::kLParen)) {
    left = parse_type(ts, sig);
    ts.expect(Tok::kRParen, "')'");
  } else {
    Token t = ts.expect(Tok::kIdent, "a type");
    if (t.text == "prop") {
      left = Type::prop();
    } else {
      if (!sig.has_base_type(t.text))
        throw ParseError(t.pos, "unknown type '" + t.text + "'");
      left = Type::base(t.text);
    }
  }
  if (ts.accept(Tok::kArrow)) return Type::arrow(left, parse_type(ts, sig));
  return left;
}

namespace {

bool reserved(const std::string& s) { return s == "forall" || s == "exists"; }

RawPtr node(RawTerm::Kind k, Pos pos, RawPtr a = nullptr, RawPtr b = nullptr,
            std::string name = "") {
  auto r = std::make_shared<RawTerm>();
  r->kind = k;
  r->pos = pos;
  r->a = std::move(a);
  r->b = std::move(b);
  r->name = std::move(name);
  return r;
}

class RawParser {
 public:
  RawParser(TokenStream& ts, const Signature& sig) : ts_(ts), sig_(sig) {}

  RawPtr term() { return imp(); }

 private:
  bool at_binder() const {
    return ts_.at(Tok::kLambda) || ts_.at_ident("forall") || ts_.at_ident("exists");
  }

  RawPtr binder() {
    Token t = ts_.next();
    RawTerm::Kind k = t.kind == Tok::kLambda   ? RawTerm::Kind::kLam
                      : t.text == "forall"     ? RawTerm::Kind::kAll
                                               : RawTerm::Kind::kEx;
    std::vector<Token> names;
    do {
      Token n = ts_.expect(Tok::kIdent, "a bound variable");
      if (reserved(n.text)) throw ParseError(n.pos, "reserved word '" + n.text + "'");
      names.push_back(n);
    } while (ts_.at(Tok::kIdent));
    std::optional<Type> annot;
    if (ts_.accept(Tok::kColon)) annot = parse_type(ts_, sig_);
    ts_.expect(Tok::kComma, "','");
    RawPtr body = term();
    for (size_t i = names.size(); i-- > 0;) {
      auto r = std::make_shared<RawTerm>();
      r->kind = k;
      r->pos = i == 0 ? t.pos : names[i].pos;
      r->name = names[i].text;
      r->annot = annot;
      r->a = body;
      body = r;
    }
    return body;
  }

  RawPtr operand(RawPtr (RawParser::*level)()) {
    if (at_binder()) return binder();
    return (this->*level)();
  }

  RawPtr imp() {
    if (at_binder()) return binder();
    RawPtr l = disj();
    if (ts_.at(Tok::kImp)) {
      Pos p = ts_.next().pos;
      return node(RawTerm::Kind::kImp, p, l, operand(&RawParser::imp));
    }
    return l;
  }

  RawPtr disj() {
    RawPtr l = conj();
    if (ts_.at(Tok::kOr)) {
      Pos p = ts_.next().pos;
      return node(RawTerm::Kind::kOr, p, l, operand(&RawParser::disj));
    }
    return l;
  }

  RawPtr conj() {
    RawPtr l = app();
    if (ts_.at(Tok::kAnd)) {
      Pos p = ts_.next().pos;
      return node(RawTerm::Kind::kAnd, p, l, operand(&RawParser::conj));
    }
    return l;
  }

  bool at_atom() const {
    if (ts_.at(Tok::kLParen)) return true;
    return ts_.at(Tok::kIdent) && !reserved(ts_.peek().text);
  }

  RawPtr app() {
    if (!at_atom()) ts_.fail("expected a term");
    RawPtr f = atom();
    while (at_atom() || at_binder()) {
      if (at_binder()) {
        RawPtr b = binder();
        return node(RawTerm::Kind::kApp, b->pos, f, b);
      }
      RawPtr a = atom();
      f = node(RawTerm::Kind::kApp, a->pos, f, a);
    }
    return f;
  }

  RawPtr atom() {
    Token t = ts_.next();
    if (t.kind == Tok::kIdent) return node(RawTerm::Kind::kIdent, t.pos, nullptr, nullptr, t.text);
    // '(' already consumed
    const Token& op = ts_.peek();
    if ((op.kind == Tok::kAnd || op.kind == Tok::kOr || op.kind == Tok::kImp) &&
        ts_.peek(1).kind == Tok::kRParen) {
      Token o = ts_.next();
      ts_.next();
      return node(RawTerm::Kind::kIdent, t.pos, nullptr, nullptr, o.text);
    }
    RawPtr inner = term();
    ts_.expect(Tok::kRParen, "')'");
    return inner;
  }

  TokenStream& ts_;
  const Signature& sig_;
};

}  // namespace

RawPtr parse_raw_term(TokenStream& ts, const Signature& sig) {
  RawParser p(ts, sig);
  return p.term();
}

// ---------------------------------------------------------------------------
// Elaboration

namespace {

struct IType;
using ITp = std::shared_ptr<IType>;
struct IType {
  enum class K { kBase, kProp, kArrow, kMeta } k;
  std::string name;
  ITp dom, cod;
  ITp ref;  // meta: solution
  int id = 0;
};

ITp from_type(const Type& t) {
  auto r = std::make_shared<IType>();
  if (t.is_base()) {
    r->k = IType::K::kBase;
    r->name = t.name();
  } else if (t.is_prop()) {
    r->k = IType::K::kProp;
  } else {
    r->k = IType::K::kArrow;
    r->dom = from_type(t.dom());
    r->cod = from_type(t.cod());
  }
  return r;
}

ITp arrow(ITp a, ITp b) {
  auto r = std::make_shared<IType>();
  r->k = IType::K::kArrow;
  r->dom = std::move(a);
  r->cod = std::move(b);
  return r;
}

ITp find(ITp t) {
  while (t->k == IType::K::kMeta && t->ref) t = t->ref;
  return t;
}

std::string show(ITp t) {
  t = find(t);
  switch (t->k) {
    case IType::K::kBase: return t->name;
    case IType::K::kProp: return "prop";
    case IType::K::kMeta: return "?" + std::to_string(t->id);
    case IType::K::kArrow: {
      ITp d = find(t->dom);
      std::string ds = show(d);
      if (d->k == IType::K::kArrow) ds = "(" + ds + ")";
      return ds + " -> " + show(t->cod);
    }
  }
  return "";
}

bool occurs(ITp m, ITp t) {
  t = find(t);
  if (t == m) return true;
  if (t->k == IType::K::kArrow) return occurs(m, t->dom) || occurs(m, t->cod);
  return false;
}

bool unify_types(ITp a, ITp b) {
  a = find(a);
  b = find(b);
  if (a == b) return true;
  if (a->k == IType::K::kMeta) {
    if (occurs(a, b)) return false;
    a->ref = b;
    return true;
  }
  if (b->k == IType::K::kMeta) return unify_types(b, a);
  if (a->k != b->k) return false;
  if (a->k == IType::K::kBase) return a->name == b->name;
  if (a->k == IType::K::kProp) return true;
  return unify_types(a->dom, b->dom) && unify_types(a->cod, b->cod);
}

// Elaborated tree before types are fixed.
struct ETerm {
  enum class K { kVar, kConst, kBound, kApp, kAbs } k;
  std::string name;
  ITp type;  // var/const type, abs binder type
  size_t index = 0;
  std::shared_ptr<ETerm> a, b;
  Pos pos;
};
using EPtr = std::shared_ptr<ETerm>;

class Elaborator {
 public:
  Elaborator(const Signature& sig, const VarContext& ctx, bool allow_new)
      : sig_(sig), ctx_(ctx), allow_new_(allow_new) {}

  std::pair<EPtr, ITp> elab(const RawTerm& r) {
    switch (r.kind) {
      case RawTerm::Kind::kIdent: return ident(r);
      case RawTerm::Kind::kApp: {
        auto [f, ft] = elab(*r.a);
        auto [x, xt] = elab(*r.b);
        ITp res = meta();
        if (!unify_types(ft, arrow(xt, res)))
          throw ParseError(r.pos, "application type mismatch: function of type " +
                                      show(ft) + " applied to argument of type " +
                                      show(xt));
        return {mk(ETerm::K::kApp, r.pos, f, x), res};
      }
      case RawTerm::Kind::kLam:
      case RawTerm::Kind::kAll:
      case RawTerm::Kind::kEx: {
        ITp bt = r.annot ? from_type(*r.annot) : meta();
        scope_.push_back({r.name, bt});
        auto [body, bodyt] = elab(*r.a);
        scope_.pop_back();
        auto abs = std::make_shared<ETerm>();
        abs->k = ETerm::K::kAbs;
        abs->name = r.name;
        abs->type = bt;
        abs->a = body;
        abs->pos = r.pos;
        if (r.kind == RawTerm::Kind::kLam) return {abs, arrow(bt, bodyt)};
        expect(bodyt, prop(), r.a->pos, "quantifier body");
        auto q = std::make_shared<ETerm>();
        q->k = ETerm::K::kConst;
        q->name = r.kind == RawTerm::Kind::kAll ? logic::kAll : logic::kEx;
        q->type = arrow(arrow(bt, prop()), prop());
        q->pos = r.pos;
        return {mk(ETerm::K::kApp, r.pos, q, abs), prop()};
      }
      case RawTerm::Kind::kAnd:
      case RawTerm::Kind::kOr:
      case RawTerm::Kind::kImp: {
        const char* n = r.kind == RawTerm::Kind::kAnd  ? logic::kAnd
                        : r.kind == RawTerm::Kind::kOr ? logic::kOr
                                                       : logic::kImp;
        auto [x, xt] = elab(*r.a);
        auto [y, yt] = elab(*r.b);
        expect(xt, prop(), r.a->pos, std::string("left operand of ") + n);
        expect(yt, prop(), r.b->pos, std::string("right operand of ") + n);
        auto c = std::make_shared<ETerm>();
        c->k = ETerm::K::kConst;
        c->name = n;
        c->type = arrow(prop(), arrow(prop(), prop()));
        c->pos = r.pos;
        return {mk(ETerm::K::kApp, r.pos, mk(ETerm::K::kApp, r.pos, c, x), y), prop()};
      }
    }
    throw ParseError(r.pos, "bad term");
  }

  void expect(ITp got, ITp want, Pos pos, const std::string& what) {
    if (!unify_types(got, want))
      throw ParseError(pos, what + " has type " + show(got) + ", expected " + show(want));
  }

  Term finish(const EPtr& e) {
    switch (e->k) {
      case ETerm::K::kVar: return Term::var(e->name, fix(e->type, e->pos, e->name));
      case ETerm::K::kConst:
        return Term::constant(e->name, fix(e->type, e->pos, e->name));
      case ETerm::K::kBound: return Term::bound(e->index);
      case ETerm::K::kApp: return Term::app(finish(e->a), finish(e->b));
      case ETerm::K::kAbs:
        return Term::abs(e->name, fix(e->type, e->pos, e->name), finish(e->a));
    }
    throw Error("bad elaborated term");
  }

  VarContext new_vars() {
    VarContext out;
    for (const auto& [n, t] : new_order_) {
      Type ty = fix(t.first, t.second, n);
      if (!ty.first_order())
        throw ParseError(t.second, "variable '" + n + "' has non-first-order type " +
                                       ty.str());
      out.add(n, ty);
    }
    return out;
  }

  static ITp prop() { return from_type(Type::prop()); }

 private:
  ITp meta() {
    auto r = std::make_shared<IType>();
    r->k = IType::K::kMeta;
    r->id = ++metas_;
    return r;
  }

  EPtr mk(ETerm::K k, Pos pos, EPtr a, EPtr b) {
    auto e = std::make_shared<ETerm>();
    e->k = k;
    e->pos = pos;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
  }

  std::pair<EPtr, ITp> ident(const RawTerm& r) {
    auto e = std::make_shared<ETerm>();
    e->pos = r.pos;
    e->name = r.name;
    for (size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i].first == r.name) {
        e->k = ETerm::K::kBound;
        e->index = scope_.size() - 1 - i;
        return {e, scope_[i].second};
      }
    }
    if (auto t = ctx_.lookup(r.name)) {
      e->k = ETerm::K::kVar;
      e->type = from_type(*t);
      return {e, e->type};
    }
    e->k = ETerm::K::kConst;
    if (r.name == logic::kTop || r.name == logic::kBot) {
      e->type = prop();
      return {e, e->type};
    }
    if (r.name == logic::kAnd || r.name == logic::kOr || r.name == logic::kImp) {
      e->type = arrow(prop(), arrow(prop(), prop()));
      return {e, e->type};
    }
    if (r.name == logic::kEq) {
      ITp a = meta();
      e->type = arrow(a, arrow(a, prop()));
      eq_instances_.push_back({a, r.pos});
      return {e, e->type};
    }
    if (auto t = sig_.lookup(r.name)) {
      e->type = from_type(*t);
      return {e, e->type};
    }
    if (!allow_new_) throw ParseError(r.pos, "unbound identifier '" + r.name + "'");
    e->k = ETerm::K::kVar;
    auto it = new_vars_.find(r.name);
    if (it == new_vars_.end()) {
      ITp t = meta();
      it = new_vars_.emplace(r.name, t).first;
      new_order_.push_back({r.name, {t, r.pos}});
    }
    e->type = it->second;
    return {e, e->type};
  }

  Type fix(ITp t, Pos pos, const std::string& what) {
    t = find(t);
    switch (t->k) {
      case IType::K::kBase: return Type::base(t->name);
      case IType::K::kProp: return Type::prop();
      case IType::K::kArrow:
        return Type::arrow(fix(t->dom, pos, what), fix(t->cod, pos, what));
      case IType::K::kMeta:
        throw ParseError(pos, "cannot determine the type of '" + what + "'");
    }
    throw Error("bad type");
  }

  const Signature& sig_;
  const VarContext& ctx_;
  bool allow_new_;
  int metas_ = 0;
  std::vector<std::pair<std::string, ITp>> scope_;
  std::map<std::string, ITp> new_vars_;
  std::vector<std::pair<std::string, std::pair<ITp, Pos>>> new_order_;
  std::vector<std::pair<ITp, Pos>> eq_instances_;
};

}  // namespace

Elaborated elaborate(const Signature& sig, const VarContext& ctx,
                     const std::vector<std::pair<RawPtr, std::optional<Type>>>& items,
                     bool allow_new_vars) {
  Elaborator el(sig, ctx, allow_new_vars);
  std::vector<EPtr> es;
  for (const auto& [raw, want] : items) {
    auto [e, t] = el.elab(*raw);
    if (want) el.expect(t, from_type(*want), raw->pos, "term");
    es.push_back(e);
  }
  Elaborated out;
  out.new_vars = el.new_vars();
  VarContext all = ctx;
  for (const auto& [n, t] : out.new_vars) all.add(n, t);
  for (size_t i = 0; i < es.size(); ++i) {
    Term t = el.finish(es[i]);
    try {
      infer_type(sig, all, t);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(items[i].first->pos, e.what());
    }
    out.terms.push_back(normalize(t));
  }
  return out;
}

Type parse_type(const Signature& sig, std::string_view text) {
  TokenStream ts(lex(text));
  Type t = parse_type(ts, sig);
  if (!ts.at(Tok::kEnd)) ts.fail("expected end of type");
  return t;
}

Term parse_term(const Signature& sig, const VarContext& ctx,
                std::string_view text, std::optional<Type> expected) {
  TokenStream ts(lex(text));
  RawPtr r = parse_raw_term(ts, sig);
  if (!ts.at(Tok::kEnd)) ts.fail("expected end of term");
  return elaborate(sig, ctx, {{r, expected}}, false).terms.at(0);
}

Term parse_formula(const Signature& sig, const VarContext& ctx,
                   std::string_view text) {
  return parse_term(sig, ctx, text, Type::prop());
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace ldmu
