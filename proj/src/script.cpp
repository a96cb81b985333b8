#include "ldmu/script.hpp"

#include <sstream>

namespace ldmu {

namespace {

class ScriptParser {
 public:
  explicit ScriptParser(std::string_view text) : ts_(lex(text)) {}

  Script run() {
    while (!ts_.at(Tok::kEnd)) statement();
    return std::move(s_);
  }

 private:
  Signature& sig() { return s_.defs.signature(); }

  void statement() {
    Token kw = ts_.expect(Tok::kIdent, "a declaration");
    if (kw.text == "kind") return kind_decl();
    if (kw.text == "type") return type_decl();
    if (kw.text == "define") return define(kw);
    if (kw.text == "measure") return measure(kw);
    if (kw.text == "theorem") return theorem(kw);
    throw ParseError(kw.pos, "unknown declaration '" + kw.text + "'");
  }

  template <typename F>
  void at(Pos pos, F&& f) {
    try {
      f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(pos, e.what());
    }
  }

  void kind_decl() {
    Token n = ts_.expect(Tok::kIdent, "a type name");
    ts_.expect_ident("type");
    ts_.expect(Tok::kDot, "'.'");
    if (n.text == "prop" || sig().has_base_type(n.text))
      throw ParseError(n.pos, "type '" + n.text + "' is already declared");
    sig().declare_base_type(n.text);
    s_.kinds.push_back(n.text);
    s_.order.push_back({Script::ItemKind::kKind, s_.kinds.size() - 1});
  }

  void type_decl() {
    Token n = ts_.expect(Tok::kIdent, "a constant name");
    Type t = parse_type(ts_, sig());
    ts_.expect(Tok::kDot, "'.'");
    at(n.pos, [&] { sig().declare(n.text, t); });
    s_.types.push_back({n.text, t});
    s_.order.push_back({Script::ItemKind::kType, s_.types.size() - 1});
  }

  void define(const Token& kw) {
    Token k = ts_.expect(Tok::kIdent, "'fix' or 'ind'");
    PredKind kind;
    if (k.text == "fix")
      kind = PredKind::kFixedPoint;
    else if (k.text == "ind")
      kind = PredKind::kInductive;
    else
      throw ParseError(k.pos, "expected 'fix' or 'ind', found '" + k.text + "'");
    Token p = ts_.expect(Tok::kIdent, "a predicate name");
    ts_.expect(Tok::kColon, "':'");
    Type t = parse_type(ts_, sig());
    ts_.expect_ident("by");
    if (auto old = sig().lookup(p.text)) {
      if (*old != t)
        throw ParseError(p.pos, "'" + p.text + "' was declared with type " + old->str());
    } else {
      at(p.pos, [&] { sig().declare(p.text, t); });
    }
    at(p.pos, [&] { s_.defs.define(p.text, kind); });
    DefineBlock block{kind, p.text, t, {}};
    if (!ts_.at(Tok::kDot)) {
      do {
        Pos hp = ts_.peek().pos;
        RawPtr head = parse_raw_term(ts_, sig());
        ts_.expect(Tok::kDefEq, "':='");
        RawPtr body = parse_raw_term(ts_, sig());
        Elaborated e;
        at(hp, [&] {
          e = elaborate(sig(), {}, {{head, Type::prop()}, {body, Type::prop()}}, true);
        });
        Clause c{kind, e.new_vars, e.terms[0], e.terms[1]};
        FormulaView v = view(c.head);
        if (v.kind != FormulaView::Kind::kAtom || v.pred != p.text)
          throw ParseError(hp, "clause head must be an atom of '" + p.text + "'");
        at(hp, [&] { s_.defs.add_clause(c); });
        block.clauses.push_back(s_.defs.clauses().back());
      } while (ts_.accept(Tok::kSemi));
    }
    ts_.expect(Tok::kDot, "'.' or ';'");
    (void)kw;
    s_.defines.push_back(block);
    s_.order.push_back({Script::ItemKind::kDefine, s_.defines.size() - 1});
  }

  long number(const char* what) {
    Token n = ts_.expect(Tok::kNumber, what);
    return std::stol(n.text);
  }

  void measure(const Token& kw) {
    Token p = ts_.expect(Tok::kIdent, "a predicate name");
    MeasureDecl m{p.text, {}, 0, false};
    if (ts_.at_ident("strict")) {
      ts_.next();
    } else {
      if (!ts_.at_ident("size")) ts_.fail("expected 'strict' or 'size'");
      while (ts_.at_ident("size")) {
        ts_.next();
        size_t i = static_cast<size_t>(number("an argument index"));
        long w = 1;
        if (ts_.at_ident("weight")) {
          ts_.next();
          w = number("a weight");
        }
        m.weights.push_back({i, w});
      }
    }
    if (ts_.at_ident("base")) {
      ts_.next();
      m.base = number("a base level");
      m.has_base = true;
    }
    ts_.expect(Tok::kDot, "'.'");
    if (s_.measure.declared(p.text))
      throw ParseError(p.pos, "second measure declaration for '" + p.text + "'");
    LevelMeasure::Entry e{m.base, m.weights};
    s_.measure.entries[p.text] = e;
    at(p.pos, [&] {
      if (!sig().contains(p.text)) throw Error("unbound identifier '" + p.text + "'");
      s_.measure.validate(sig());
    });
    (void)kw;
    s_.measures.push_back(m);
    s_.order.push_back({Script::ItemKind::kMeasure, s_.measures.size() - 1});
  }

  void theorem(const Token& kw) {
    Token n = ts_.expect(Tok::kIdent, "a theorem name");
    ts_.expect(Tok::kColon, "':'");
    Pos fp = ts_.peek().pos;
    RawPtr f = parse_raw_term(ts_, sig());
    ts_.expect(Tok::kDot, "'.'");
    Elaborated e;
    at(fp, [&] { e = elaborate(sig(), {}, {{f, Type::prop()}}, false); });
    ts_.expect_ident("proof");
    ProofRef pr;
    if (ts_.at_ident("file")) {
      ts_.next();
      pr.kind = ProofRef::Kind::kFile;
      pr.path = ts_.expect(Tok::kString, "a file name").text;
    } else if (ts_.at_ident("auto")) {
      ts_.next();
      pr.kind = ProofRef::Kind::kAuto;
      pr.depth = static_cast<int>(number("a search depth"));
    } else {
      ts_.fail("expected 'file' or 'auto'");
    }
    ts_.expect(Tok::kDot, "'.'");
    for (const auto& t : s_.theorems)
      if (t.name == n.text) throw ParseError(n.pos, "duplicate theorem '" + n.text + "'");
    s_.theorems.push_back({n.text, e.terms[0], pr, kw.pos});
    s_.order.push_back({Script::ItemKind::kTheorem, s_.theorems.size() - 1});
  }

  TokenStream ts_;
  Script s_;
};

}  // namespace

Script parse_script(std::string_view text) {
  ScriptParser p(text);
  return p.run();
}

std::string print_script(const Script& s) {
  std::ostringstream os;
  for (const auto& [k, i] : s.order) {
    switch (k) {
      case Script::ItemKind::kKind: os << "kind " << s.kinds[i] << " type.\n"; break;
      case Script::ItemKind::kType:
        os << "type " << s.types[i].first << " " << s.types[i].second.str() << ".\n";
        break;
      case Script::ItemKind::kDefine: {
        const DefineBlock& d = s.defines[i];
        os << "define " << (d.kind == PredKind::kInductive ? "ind " : "fix ") << d.pred
           << " : " << d.type.str() << " by";
        for (size_t j = 0; j < d.clauses.size(); ++j) {
          os << (j ? "\n  ; " : "\n    ") << d.clauses[j].head.str()
             << " := " << d.clauses[j].body.str();
        }
        os << ".\n";
        break;
      }
      case Script::ItemKind::kMeasure: {
        const MeasureDecl& m = s.measures[i];
        os << "measure " << m.pred;
        if (m.weights.empty()) os << " strict";
        for (const auto& [idx, w] : m.weights) {
          os << " size " << idx;
          if (w != 1) os << " weight " << w;
        }
        if (m.has_base) os << " base " << m.base;
        os << ".\n";
        break;
      }
      case Script::ItemKind::kTheorem: {
        const TheoremDecl& t = s.theorems[i];
        os << "theorem " << t.name << " : " << t.statement.str() << ".\n  proof ";
        if (t.proof.kind == ProofRef::Kind::kFile)
          os << "file " << quote(t.proof.path) << ".\n";
        else
          os << "auto " << t.proof.depth << ".\n";
        break;
      }
    }
  }
  return os.str();
}

bool operator==(const Script& a, const Script& b) {
  if (a.kinds != b.kinds || a.order != b.order) return false;
  if (a.types != b.types) return false;
  if (a.defines.size() != b.defines.size()) return false;
  for (size_t i = 0; i < a.defines.size(); ++i) {
    const auto& x = a.defines[i];
    const auto& y = b.defines[i];
    if (x.kind != y.kind || x.pred != y.pred || x.type != y.type ||
        x.clauses.size() != y.clauses.size())
      return false;
    for (size_t j = 0; j < x.clauses.size(); ++j) {
      if (!(x.clauses[j].vars == y.clauses[j].vars) || x.clauses[j].head != y.clauses[j].head ||
          x.clauses[j].body != y.clauses[j].body)
        return false;
    }
  }
  if (a.measures.size() != b.measures.size()) return false;
  for (size_t i = 0; i < a.measures.size(); ++i) {
    const auto& x = a.measures[i];
    const auto& y = b.measures[i];
    if (x.pred != y.pred || x.weights != y.weights || x.base != y.base ||
        x.has_base != y.has_base)
      return false;
  }
  if (a.theorems.size() != b.theorems.size()) return false;
  for (size_t i = 0; i < a.theorems.size(); ++i) {
    const auto& x = a.theorems[i];
    const auto& y = b.theorems[i];
    if (x.name != y.name || x.statement != y.statement || x.proof.kind != y.proof.kind ||
        x.proof.path != y.proof.path || x.proof.depth != y.proof.depth)
      return false;
  }
  return true;
}

}  // namespace ldmu
