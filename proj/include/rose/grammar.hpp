#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rose/interlingua.hpp"

namespace rose {

using SymbolId = std::uint32_t;

// Structure-building action attached to a rule.  A small declarative
// expression language with four constructors:
//
//   $i                       child-ref: value of the i-th rhs symbol (1-based)
//   NAME / 12                atom
//   frame(*F, SLOT=e, ...)   make-frame with slot assignments
//   set(e, SLOT, e)          copy of a structure with one slot (re)assigned
//
// Slot assignments whose value evaluates to nothing are dropped.
class ActionTemplate {
 public:
  enum class Kind { ChildRef, AtomLit, MakeFrame, SetSlot };

  struct Node {
    Kind kind = Kind::AtomLit;
    std::size_t child = 0;  // ChildRef: 1-based index
    Atom atom;              // AtomLit
    std::string name;       // MakeFrame: frame; SetSlot: slot
    std::vector<std::pair<std::string, std::size_t>> assignments;  // MakeFrame
    std::size_t target = 0;                                         // SetSlot
    std::size_t value = 0;                                          // SetSlot
  };

  ActionTemplate() = default;  // evaluates to nothing
  static ActionTemplate parse(std::string_view text);
  static ActionTemplate child_ref(std::size_t index);

  bool empty() const { return nodes_.empty(); }
  std::string to_string() const;
  // Largest child index referenced, 0 when none.
  std::size_t max_child_ref() const;
  // Frame built at the root, when the root is make-frame or set-slot over one.
  std::optional<std::string> result_frame() const;

  // nullopt when the template cannot be applied to these children
  // (set-slot on a non-structure, out-of-range child).
  std::optional<Value> evaluate(std::span<const Value> children) const;

  friend bool operator==(const ActionTemplate& a, const ActionTemplate& b) { return a.to_string() == b.to_string(); }

 private:
  std::optional<Value> eval(std::size_t node, std::span<const Value> children) const;
  std::string print(std::size_t node) const;

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

struct Rule {
  SymbolId lhs = 0;
  std::vector<SymbolId> rhs;
  ActionTemplate action;
};

struct LexicalEntry {
  SymbolId category = 0;
  Value value;
};

// Context-free semantic grammar plus lexicon.
//
// File format (line-oriented, '#' starts a comment line):
//   %start S
//   %terminal a plus             declares terminal categories
//   %frame NT *FRAME             result frame used when NT is hypothesized
//   S -> NP VP : set($2, WHO, $1)
//   X ->                         epsilon rule (no action: evaluates to nothing)
//   out :: RESP : ((FRAME *RESPOND) (TYPE NEGATIVE))
// A rule without an action gets `$1` when its rhs is non-empty.  A token
// absent from the lexicon that spells a declared terminal is its own
// category with an atomic value.
class Grammar {
 public:
  static constexpr SymbolId kEnd = 0;  // "$" end-of-input terminal

  static Grammar parse(std::string_view text);
  static Grammar load(const std::string& path);
  std::string serialize() const;

  std::size_t symbol_count() const { return names_.size(); }
  const std::string& name(SymbolId s) const { return names_[s]; }
  bool is_terminal(SymbolId s) const { return terminal_[s]; }
  std::optional<SymbolId> find(std::string_view name) const;
  std::vector<SymbolId> terminals() const;     // excluding kEnd
  std::vector<SymbolId> nonterminals() const;  // in first-appearance order

  SymbolId start() const { return start_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(std::size_t id) const { return rules_[id]; }
  const std::map<std::string, std::vector<LexicalEntry>>& lexicon() const { return lexicon_; }

  // Lexical readings of a token; empty when the token is unknown.
  std::vector<LexicalEntry> lookup(std::string_view token) const;

  // Least number of terminals derivable from nt; nullopt when nt is
  // nonproductive.  Precomputed at load time.
  std::optional<std::size_t> min_yield_of(SymbolId nt) const { return min_yield_[nt]; }
  // Frame of the placeholder value used when nt is hypothesized.
  const std::optional<std::string>& result_frame(SymbolId nt) const { return result_frames_[nt]; }

  std::uint64_t hash() const;

  friend bool operator==(const Grammar& a, const Grammar& b) { return a.serialize() == b.serialize(); }

 private:
  SymbolId intern(std::string_view name);
  void finalize();

  std::vector<std::string> names_;
  std::vector<bool> terminal_;
  std::vector<bool> declared_terminal_;
  std::map<std::string, SymbolId, std::less<>> ids_;
  SymbolId start_ = 0;
  std::vector<Rule> rules_;
  std::map<std::string, std::vector<LexicalEntry>> lexicon_;
  std::vector<std::pair<SymbolId, std::string>> frame_decls_;
  std::vector<std::optional<std::size_t>> min_yield_;
  std::vector<std::optional<std::string>> result_frames_;
};

Grammar load_grammar(std::string_view text);

// Least number of words derivable from the named nonterminal.  Throws
// nonproductive-symbol when nothing terminal is derivable.
std::size_t min_yield(const Grammar& g, std::string_view nonterminal);

// Lowercases and splits on whitespace, dropping sentence punctuation.
std::vector<std::string> tokenize(std::string_view sentence);

}  // namespace rose
