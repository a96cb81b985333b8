#include "ldmu/proof_io.hpp"

#include "ldmu/syntax.hpp"

namespace ldmu {

namespace {

class ProofReader {
 public:
  explicit ProofReader(std::string_view text) : ts_(lex(text)) {}

  ProofTree run() {
    ProofTree t = rule();
    if (!ts_.at(Tok::kEnd)) ts_.fail("unexpected text after the proof");
    return t;
  }

  GroundFile run_ground() {
    GroundFile f;
    ts_.expect(Tok::kLParen, "'('");
    ts_.expect_ident("goal");
    while (ts_.accept(Tok::kLParen)) {
      Token kw = ts_.expect(Tok::kIdent, "'hyp' or 'concl'");
      std::string text = ts_.expect(Tok::kString, "a formula").text;
      if (kw.text == "hyp")
        f.hyps.push_back(text);
      else if (kw.text == "concl")
        f.concl = text;
      else
        throw ParseError(kw.pos, "expected 'hyp' or 'concl'");
      ts_.expect(Tok::kRParen, "')'");
    }
    ts_.expect(Tok::kRParen, "')'");
    if (f.concl.empty()) ts_.fail("goal has no conclusion");
    f.tree = run();
    return f;
  }

 private:
  size_t number() {
    Token n = ts_.expect(Tok::kNumber, "a number");
    return static_cast<size_t>(std::stoul(n.text));
  }

  ProofTree rule() {
    ts_.expect(Tok::kLParen, "'('");
    ts_.expect_ident("rule");
    Token tag = ts_.expect(Tok::kIdent, "a rule name");
    auto r = rule_from_name(tag.text);
    if (!r) throw ParseError(tag.pos, "unknown rule '" + tag.text + "'");
    ProofTree t;
    t.rule = *r;
    while (ts_.at(Tok::kLParen)) {
      Token kw = ts_.peek(1);
      if (kw.kind == Tok::kIdent && kw.text == "rule") {
        t.premises.push_back(rule());
        continue;
      }
      ts_.next();
      Token item = ts_.expect(Tok::kIdent, "a data item");
      const std::string& k = item.text;
      if (k == "hyp") {
        if (ts_.at(Tok::kNumber))
          t.hyps.push_back(HypRef::at(number()));
        else
          t.hyps.push_back(HypRef::parse(ts_.expect(Tok::kString, "a formula").text));
      } else if (k == "term" || k == "invariant") {
        t.term = TermRef::parse(ts_.expect(Tok::kString, "a term").text);
      } else if (k == "name") {
        t.name = ts_.expect(Tok::kIdent, "a name").text;
      } else if (k == "clause") {
        t.clause = number();
      } else if (k == "side") {
        Token s = ts_.expect(Tok::kIdent, "'left' or 'right'");
        if (s.text != "left" && s.text != "right")
          throw ParseError(s.pos, "expected 'left' or 'right'");
        t.side = s.text == "left" ? 0 : 1;
      } else if (k == "cut") {
        t.cuts.push_back(TermRef::parse(ts_.expect(Tok::kString, "a formula").text));
      } else if (k == "partition") {
        while (ts_.accept(Tok::kLParen)) {
          std::vector<size_t> group;
          while (ts_.at(Tok::kNumber)) group.push_back(number());
          ts_.expect(Tok::kRParen, "')'");
          t.partition.push_back(group);
        }
      } else if (k == "family") {
        if (!t.premises.empty()) throw ParseError(item.pos, "family must precede premises");
        while (ts_.accept(Tok::kLParen)) {
          std::vector<TermRef> key;
          while (ts_.at(Tok::kString)) key.push_back(TermRef::parse(ts_.next().text));
          t.family_keys.push_back(key);
          t.premises.push_back(rule());
          ts_.expect(Tok::kRParen, "')'");
        }
      } else {
        throw ParseError(item.pos, "unknown data item '" + k + "'");
      }
      ts_.expect(Tok::kRParen, "')'");
    }
    ts_.expect(Tok::kRParen, "')'");
    return t;
  }

  TokenStream ts_;
};

void write(const ProofTree& t, int indent, std::string& out) {
  std::string pad(static_cast<size_t>(indent), ' ');
  out += pad + "(rule " + rule_name(t.rule);
  for (const auto& h : t.hyps)
    out += h.index ? " (hyp " + std::to_string(*h.index) + ")" : " (hyp " + quote(h.str()) + ")";
  if (t.term) out += std::string(t.rule == Rule::kMuL ? " (invariant " : " (term ") + quote(t.term->str()) + ")";
  if (!t.name.empty()) out += " (name " + t.name + ")";
  if (t.clause) out += " (clause " + std::to_string(*t.clause) + ")";
  if (t.side) out += std::string(" (side ") + (*t.side == 0 ? "left" : "right") + ")";
  for (const auto& c : t.cuts) out += " (cut " + quote(c.str()) + ")";
  if (!t.partition.empty()) {
    out += " (partition";
    for (const auto& g : t.partition) {
      out += " (";
      for (size_t i = 0; i < g.size(); ++i) out += (i ? " " : "") + std::to_string(g[i]);
      out += ")";
    }
    out += ")";
  }
  size_t first = 0;
  if (!t.family_keys.empty()) {
    out += "\n" + pad + "  (family";
    for (size_t i = 0; i < t.family_keys.size(); ++i) {
      out += "\n" + pad + "   (";
      for (size_t j = 0; j < t.family_keys[i].size(); ++j)
        out += (j ? " " : "") + quote(t.family_keys[i][j].str());
      out += "\n";
      write(t.premises[i], indent + 4, out);
      out += ")";
    }
    out += ")";
    first = t.family_keys.size();
  }
  for (size_t i = first; i < t.premises.size(); ++i) {
    out += "\n";
    write(t.premises[i], indent + 2, out);
  }
  out += ")";
}

}  // namespace

ProofTree read_proof(std::string_view text) {
  ProofReader r(text);
  return r.run();
}

GroundFile read_ground_file(std::string_view text) {
  ProofReader r(text);
  return r.run_ground();
}

std::string write_ground_file(const GroundFile& f) {
  std::string out = "(goal";
  for (const auto& h : f.hyps) out += " (hyp " + quote(h) + ")";
  out += " (concl " + quote(f.concl) + "))\n";
  return out + write_proof(f.tree);
}

std::string write_proof(const ProofTree& t) {
  std::string out;
  write(t, 0, out);
  return out + "\n";
}

}  // namespace ldmu
