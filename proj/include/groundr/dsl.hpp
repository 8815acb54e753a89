#pragma once

// Protocol programs: a line-oriented imperative DSL.
//
//   protocol <name>
//     op <op_type> [id <ident>] [in r,...] [out r,...] [dur <number><s|min|h>] [param k=v]*
//   end
//
// `#` starts a comment. A file may hold several protocol blocks. Operations
// without an explicit `id` are numbered `op1`, `op2`, ... in source order.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "groundr/error.hpp"

namespace groundr {

struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;
};

struct Diagnostic {
  SourceLocation where;
  std::string message;

  /// `file:line:column: message`
  std::string str() const;
};

class DslError : public Error {
 public:
  explicit DslError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// A parameter value as written, split into its numeric part and unit
/// (`37C` -> {"37", "C"}). Non-numeric values keep an empty unit.
struct Quantity {
  std::string value;
  std::string unit;
  bool operator==(const Quantity&) const = default;
};

struct Operation {
  std::string id;
  std::string op_type;
  std::vector<std::string> preconditions;   // source order, no duplicates
  std::vector<std::string> postconditions;  // source order, no duplicates
  std::map<std::string, Quantity> parameters;
  std::optional<double> duration_s;

  bool operator==(const Operation&) const = default;
};

struct Protocol {
  std::string name;
  std::vector<Operation> operations;

  bool operator==(const Protocol&) const = default;
};

enum class CorpusRole { target, universe, scaling, schedule_subset };

struct Corpus {
  std::vector<Protocol> protocols;
  CorpusRole role = CorpusRole::target;

  std::size_t size() const { return protocols.size(); }
  bool empty() const { return protocols.empty(); }
  const Protocol* find(std::string_view name) const;
  /// Protocol names in corpus order.
  std::vector<std::string> names() const;
  bool operator==(const Corpus&) const = default;
};

/// Default identifier of the operation at zero-based position `index`.
std::string default_operation_id(std::size_t index);

/// Parses every `protocol ... end` block in `text`.
std::vector<Protocol> parse_protocols(std::string_view text, const std::string& source = "<input>");

/// Parses text holding exactly one protocol block.
Protocol parse_protocol(std::string_view text, const std::string& source = "<input>");

/// Loads a single `.proto.dsl` file, or every `.proto.dsl` file in a
/// directory ordered by filename. Any error aborts the whole load and all
/// diagnostics are reported together.
Corpus parse_corpus(const std::filesystem::path& path);

/// Checks the Operation/Protocol invariants; throws DslError.
void validate_protocol(const Protocol& p);

/// Canonical DSL text for `p`; parse_protocol(to_dsl(p)) == p.
std::string to_dsl(const Protocol& p);

/// Interchange document:
/// {name, operations: [{id, op_type, in, out, dur_s, params: {k: {value, unit}}}]}
nlohmann::json serialize_protocol(const Protocol& p);
Protocol deserialize_protocol(const nlohmann::json& doc);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace groundr
