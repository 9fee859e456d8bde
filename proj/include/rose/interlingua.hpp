#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rose {

// Typed scalar slot filler.  Numbers keep their source spelling so that
// literals print back exactly as written.
struct Atom {
  enum class Kind { Symbol, Number };

  Kind kind = Kind::Symbol;
  std::string text;

  static Atom symbol(std::string text) { return {Kind::Symbol, std::move(text)}; }
  static Atom number(std::string text) { return {Kind::Number, std::move(text)}; }
  // Number when the whole spelling parses as a decimal, symbol otherwise.
  static Atom from_text(std::string text);

  friend bool operator==(const Atom&, const Atom&) = default;
};

class FeatureStructure;
using FsPtr = std::shared_ptr<const FeatureStructure>;

// A slot filler: an atom, a nested structure, or a *MULTIPLE* set of structures.
struct Filler {
  using Multiple = std::vector<FsPtr>;
  std::variant<Atom, FsPtr, Multiple> value;

  bool is_atom() const { return std::holds_alternative<Atom>(value); }
  bool is_structure() const { return std::holds_alternative<FsPtr>(value); }
  bool is_multiple() const { return std::holds_alternative<Multiple>(value); }
  const Atom& atom() const { return std::get<Atom>(value); }
  const FsPtr& structure() const { return std::get<FsPtr>(value); }
  const Multiple& multiple() const { return std::get<Multiple>(value); }

  friend bool operator==(const Filler& a, const Filler& b);
};

// Frame plus slots.  Values are immutable once shared through FsPtr; nested
// structures are shared, never deep-copied.  Synthetic structures are the
// empty placeholder frames produced by nonterminal insertion.
class FeatureStructure {
 public:
  using SlotMap = std::map<std::string, Filler, std::less<>>;

  FeatureStructure() = default;
  explicit FeatureStructure(std::string frame, bool synthetic = false)
      : frame_(std::move(frame)), synthetic_(synthetic) {}

  const std::string& frame() const { return frame_; }
  bool synthetic() const { return synthetic_; }
  const SlotMap& slots() const { return slots_; }

  const Filler* find(std::string_view slot) const;
  void set(std::string slot, Filler filler) { slots_.insert_or_assign(std::move(slot), std::move(filler)); }
  void set(std::string slot, Atom atom) { set(std::move(slot), Filler{std::move(atom)}); }
  void set(std::string slot, FsPtr fs) { set(std::move(slot), Filler{std::move(fs)}); }
  bool erase(std::string_view slot);

  friend bool operator==(const FeatureStructure& a, const FeatureStructure& b);

 private:
  std::string frame_;
  SlotMap slots_;
  bool synthetic_ = false;
};

template <class... Args>
FsPtr make_fs(Args&&... args) {
  return std::make_shared<const FeatureStructure>(std::forward<Args>(args)...);
}

// Semantic value carried through parsing: nothing, an atom, or a structure.
using Value = std::variant<std::monostate, Atom, FsPtr>;

bool values_equal(const Value& a, const Value& b);
std::size_t hash_value(const Value& v);
std::size_t hash_fs(const FeatureStructure& fs);

class InterlinguaSpec;

// Parenthesized literal notation: ((FRAME *NAME) (SLOT VALUE) ...), with
// (SLOT (*MULTIPLE* s1 s2 ...)) for multi-valued slots.
FsPtr parse_fs(std::string_view text);
// Either a structure literal or a bare atom.
Value parse_value(std::string_view text);

// FRAME first, remaining slots alphabetically.
std::string to_literal(const FeatureStructure& fs);
// FRAME first, remaining slots in the frame's declaration order.
std::string to_literal(const FeatureStructure& fs, const InterlinguaSpec& spec);
std::string to_literal(const Value& v);
std::string to_literal(const Value& v, const InterlinguaSpec& spec);

// Frame/slot/filler-type schema.
//
// File format (one declaration per line, '#' starts a comment):
//   type TEMPORAL : *SIMPLE-TIME *INTERVAL
//   frame *RESPOND : DEGREE TYPE WHEN
//   slot WHEN : TEMPORAL *THAT
//   slot DEGREE : @symbol
// Allowed filler entries name a type, a single frame, or one of the atomic
// kinds @symbol, @number, @atom.
class InterlinguaSpec {
 public:
  static constexpr std::string_view kAtomType = "@atom";

  struct FrameDecl {
    std::string name;
    std::string type;
    std::vector<std::string> slots;
  };
  struct SlotDecl {
    std::string name;
    std::vector<std::string> allowed;
  };

  static InterlinguaSpec parse(std::string_view text);
  static InterlinguaSpec load(const std::string& path);
  std::string serialize() const;

  const FrameDecl* frame(std::string_view name) const;
  const SlotDecl* slot(std::string_view name) const;
  const std::vector<FrameDecl>& frames() const { return frames_; }
  const std::vector<SlotDecl>& slot_decls() const { return slots_; }

  // Type tag used for statistics: the enclosing type, or the frame's own name
  // when it belongs to no type.
  std::string type_of(std::string_view frame) const;
  // Every type tag a filler can have, atomic tag last.
  std::vector<std::string> type_tags() const;

  bool frame_has_slot(std::string_view frame, std::string_view slot) const;
  bool admits_frame(std::string_view slot, std::string_view frame) const;
  bool admits_atom(std::string_view slot, const Atom& atom) const;

 private:
  void check() const;

  std::vector<FrameDecl> frames_;
  std::vector<SlotDecl> slots_;
  std::vector<std::pair<std::string, std::vector<std::string>>> types_;
};

struct Violation {
  std::string path;
  std::string message;
};

// Empty when fs is legal under spec.
std::vector<Violation> validate(const FeatureStructure& fs, const InterlinguaSpec& spec);
inline bool is_valid(const FeatureStructure& fs, const InterlinguaSpec& spec) {
  return validate(fs, spec).empty();
}

// Scores how plausible it is to place a filler of the given type in a slot.
// Implemented by the trained statistics model.
class SlotScorer {
 public:
  virtual ~SlotScorer() = default;
  virtual std::optional<double> score(std::string_view slot, std::string_view filler_type) const = 0;
};

struct InsertResult {
  FsPtr result;
  std::string slot;
};

// Places child in a licensed slot of parent.  Empty licensed slots are tried
// first, best-scored first (declaration order without a scorer); an occupied
// slot turns into a *MULTIPLE* set.  nullopt when no slot admits the child.
std::optional<InsertResult> insert(const FeatureStructure& parent, const FsPtr& child,
                                   const InterlinguaSpec& spec, const SlotScorer* scorer = nullptr);

// Unifies two structures of the same frame.  nullopt on clash.
std::optional<FsPtr> merge(const FsPtr& a, const FsPtr& b, const InterlinguaSpec& spec);

// Frames plus atomic fillers, recursively.
std::size_t size(const FeatureStructure& fs);

struct Similarity {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Fact multiset used by similarity(): one fact per (non-synthetic) frame and
// one per (frame, slot, filler) edge.  Exposed for tests and diagnostics.
std::vector<std::string> facts(const FeatureStructure& fs);

Similarity similarity(const FeatureStructure& candidate, const FeatureStructure& gold);

}  // namespace rose
