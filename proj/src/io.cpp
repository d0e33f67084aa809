#include "sobn/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "sobn/errors.hpp"

namespace sobn {

ParseError::ParseError(Kind kind, int line, int column,
                       const std::string& message)
    : std::runtime_error([&] {
        std::ostringstream out;
        out << to_string(kind);
        if (line > 0) {
          out << " at line " << line;
          if (column > 0) out << ", column " << column;
        }
        out << ": " << message;
        return out.str();
      }()),
      kind_(kind),
      line_(line),
      column_(column) {}

const char* to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Syntax: return "syntax error";
    case ParseError::Kind::UnknownField: return "unknown field";
    case ParseError::Kind::DuplicateVariable: return "duplicate variable";
    case ParseError::Kind::UnknownParent: return "unknown parent";
    case ParseError::Kind::Domain: return "domain error";
    case ParseError::Kind::RowSum: return "row sum error";
    case ParseError::Kind::MissingRow: return "missing row";
    case ParseError::Kind::Cycle: return "cycle";
  }
  return "error";
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

namespace {

using Kind = ParseError::Kind;

struct Token {
  std::string text;
  int line;
  int column;
};

struct Line {
  std::vector<Token> tokens;
  int number;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  int line_number = 0;
  std::istringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    ++line_number;
    Line line{{}, line_number};
    std::size_t i = 0;
    while (i < raw.size()) {
      if (std::isspace(static_cast<unsigned char>(raw[i]))) {
        ++i;
        continue;
      }
      if (raw[i] == '#') break;
      std::size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])))
        ++i;
      line.tokens.push_back(
          {raw.substr(start, i - start), line_number, static_cast<int>(start) + 1});
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

double parse_number(const Token& token, Kind kind = Kind::Syntax) {
  try {
    std::size_t used = 0;
    double value = std::stod(token.text, &used);
    if (used != token.text.size())
      throw ParseError(kind, token.line, token.column,
                       "bad number '" + token.text + "'");
    return value;
  } catch (const std::invalid_argument&) {
    throw ParseError(kind, token.line, token.column,
                     "bad number '" + token.text + "'");
  } catch (const std::out_of_range&) {
    throw ParseError(kind, token.line, token.column,
                     "number out of range '" + token.text + "'");
  }
}

void expect_header(const std::vector<Line>& lines, const std::string& name) {
  if (lines.empty())
    throw ParseError(Kind::Syntax, 0, 0, "empty document, expected " + name);
  const Line& first = lines.front();
  if (first.tokens[0].text != name)
    throw ParseError(Kind::Syntax, first.tokens[0].line, first.tokens[0].column,
                     "expected '" + name + " 1' header");
  if (first.tokens.size() != 2 || first.tokens[1].text != "1")
    throw ParseError(Kind::Syntax, first.tokens[0].line, first.tokens[0].column,
                     "unsupported " + name + " version");
}

// Splits "a,b,c" into parts; empty parts are syntax errors.
std::vector<std::string> split_key(const Token& token) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : token.text) {
    if (c == ',') {
      if (current.empty())
        throw ParseError(Kind::Syntax, token.line, token.column, "empty key part");
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (current.empty())
    throw ParseError(Kind::Syntax, token.line, token.column, "empty key part");
  parts.push_back(current);
  return parts;
}

}  // namespace

ParsedNetwork parse_network(const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  expect_header(lines, "sobn-network");

  std::optional<bool> uncertain;
  std::vector<Variable> variables;
  std::map<std::string, int> ids;
  std::map<int, Token> parent_lines;          // child id -> line token (dup check)
  std::map<int, std::vector<int>> parent_ids;  // child id -> parents

  struct TableBlock {
    Token header;
    int variable;
    std::vector<std::pair<Token, std::vector<double>>> rows;  // key token, values
  };
  std::vector<TableBlock> blocks;

  // pass 1: kind and variables (declaration order defines ids)
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& t = lines[i].tokens;
    if (t[0].text == "kind") {
      if (t.size() != 2)
        throw ParseError(Kind::Syntax, t[0].line, t[0].column, "kind takes one value");
      if (uncertain.has_value())
        throw ParseError(Kind::Syntax, t[0].line, t[0].column, "kind declared twice");
      if (t[1].text == "concrete")
        uncertain = false;
      else if (t[1].text == "uncertain")
        uncertain = true;
      else
        throw ParseError(Kind::Syntax, t[1].line, t[1].column,
                         "kind must be 'concrete' or 'uncertain'");
    } else if (t[0].text == "variable") {
      if (t.size() < 5 || t[2].text != ":")
        throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                         "expected: variable NAME : STATE STATE ...");
      const std::string& name = t[1].text;
      if (ids.count(name))
        throw ParseError(Kind::DuplicateVariable, t[1].line, t[1].column, name);
      Variable var;
      var.id = static_cast<int>(variables.size());
      var.name = name;
      for (std::size_t k = 3; k < t.size(); ++k) {
        for (const std::string& existing : var.state_names)
          if (existing == t[k].text)
            throw ParseError(Kind::Syntax, t[k].line, t[k].column,
                             "duplicate state name '" + t[k].text + "'");
        var.state_names.push_back(t[k].text);
      }
      var.cardinality = static_cast<int>(var.state_names.size());
      ids[name] = var.id;
      variables.push_back(std::move(var));
    }
  }
  if (!uncertain.has_value())
    throw ParseError(Kind::Syntax, 0, 0, "missing 'kind' declaration");
  if (variables.empty())
    throw ParseError(Kind::Syntax, 0, 0, "no variables declared");

  // pass 2: parents and table blocks
  const std::string table_word = *uncertain ? "alphas" : "probabilities";
  const std::string other_word = *uncertain ? "probabilities" : "alphas";
  TableBlock* open_block = nullptr;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& t = lines[i].tokens;
    const std::string& word = t[0].text;
    if (word == "kind" || word == "variable") {
      if (open_block)
        throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                         "declaration inside a table block");
      continue;
    }
    if (word == "parents") {
      if (open_block)
        throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                         "declaration inside a table block");
      if (t.size() < 4 || t[2].text != ":")
        throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                         "expected: parents CHILD : PARENT ...");
      auto child = ids.find(t[1].text);
      if (child == ids.end())
        throw ParseError(Kind::UnknownParent, t[1].line, t[1].column,
                         "undeclared variable '" + t[1].text + "'");
      if (parent_lines.count(child->second))
        throw ParseError(Kind::Syntax, t[1].line, t[1].column,
                         "parents of '" + t[1].text + "' declared twice");
      parent_lines.emplace(child->second, t[1]);
      std::vector<int>& plist = parent_ids[child->second];
      for (std::size_t k = 3; k < t.size(); ++k) {
        auto parent = ids.find(t[k].text);
        if (parent == ids.end())
          throw ParseError(Kind::UnknownParent, t[k].line, t[k].column,
                           "undeclared parent '" + t[k].text + "'");
        for (int existing : plist)
          if (existing == parent->second)
            throw ParseError(Kind::Syntax, t[k].line, t[k].column,
                             "repeated parent '" + t[k].text + "'");
        plist.push_back(parent->second);
      }
    } else if (word == table_word) {
      if (open_block)
        throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                         "table block not closed before a new one");
      if (t.size() != 2)
        throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                         "expected: " + table_word + " VARIABLE");
      auto var = ids.find(t[1].text);
      if (var == ids.end())
        throw ParseError(Kind::Syntax, t[1].line, t[1].column,
                         "undeclared variable '" + t[1].text + "'");
      for (const TableBlock& existing : blocks)
        if (existing.variable == var->second)
          throw ParseError(Kind::Syntax, t[1].line, t[1].column,
                           "table for '" + t[1].text + "' declared twice");
      blocks.push_back(TableBlock{t[0], var->second, {}});
      open_block = &blocks.back();
    } else if (word == other_word) {
      throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                       "'" + other_word + "' table does not match the declared kind");
    } else if (word == "end") {
      if (!open_block)
        throw ParseError(Kind::Syntax, t[0].line, t[0].column, "'end' outside a table block");
      open_block = nullptr;
    } else if (open_block) {
      // row: KEY : v1 v2 ...
      if (t.size() < 3 || t[1].text != ":")
        throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                         "expected: KEY : VALUE ...");
      std::vector<double> values;
      for (std::size_t k = 2; k < t.size(); ++k)
        values.push_back(parse_number(t[k]));
      open_block->rows.emplace_back(t[0], std::move(values));
    } else {
      throw ParseError(Kind::UnknownField, t[0].line, t[0].column,
                       "unknown directive '" + word + "'");
    }
  }
  if (open_block)
    throw ParseError(Kind::Syntax, 0, 0, "unterminated table block");

  // structure: detect cycles before building tables
  std::vector<std::vector<int>> parents(variables.size());
  for (auto& [child, plist] : parent_ids) parents[child] = plist;
  {
    std::vector<int> in_degree(variables.size(), 0);
    std::vector<std::vector<int>> children(variables.size());
    for (std::size_t v = 0; v < parents.size(); ++v) {
      in_degree[v] = static_cast<int>(parents[v].size());
      for (int p : parents[v]) children[p].push_back(static_cast<int>(v));
    }
    std::vector<int> ready;
    for (std::size_t v = 0; v < parents.size(); ++v)
      if (in_degree[v] == 0) ready.push_back(static_cast<int>(v));
    std::size_t seen = 0;
    while (!ready.empty()) {
      int v = ready.back();
      ready.pop_back();
      ++seen;
      for (int c : children[v])
        if (--in_degree[c] == 0) ready.push_back(c);
    }
    if (seen != parents.size())
      throw ParseError(Kind::Cycle, 0, 0, "the edge set has a directed cycle");
  }
  NetworkStructure structure(variables, parents);

  // tables: normalize row order to the parent_config_index convention
  std::vector<MatrixXd> tables(variables.size());
  std::vector<bool> have_table(variables.size(), false);
  for (const TableBlock& block : blocks) {
    const int v = block.variable;
    const Variable& var = structure.variable(v);
    const std::vector<int>& plist = structure.parents(v);
    const std::vector<int> cards = structure.parent_cardinalities(v);
    const int rows = structure.row_count(v);
    MatrixXd table(rows, var.cardinality);
    std::vector<bool> seen(rows, false);
    for (const auto& [key, values] : block.rows) {
      int config = 0;
      if (key.text == ".") {
        if (!plist.empty())
          throw ParseError(Kind::Syntax, key.line, key.column,
                           "'.' key on a variable with parents");
      } else {
        const std::vector<std::string> parts = split_key(key);
        if (parts.size() != plist.size())
          throw ParseError(Kind::Syntax, key.line, key.column,
                           "key arity does not match the parent count");
        std::vector<int> states(parts.size());
        for (std::size_t k = 0; k < parts.size(); ++k) {
          states[k] = structure.state_index(plist[k], parts[k]);
          if (states[k] < 0)
            throw ParseError(Kind::Syntax, key.line, key.column,
                             "unknown state '" + parts[k] + "' for parent '" +
                                 structure.variable(plist[k]).name + "'");
        }
        config = parent_config_index(states, cards);
      }
      if (seen[config])
        throw ParseError(Kind::Syntax, key.line, key.column,
                         "row '" + key.text + "' given twice");
      seen[config] = true;
      if (static_cast<int>(values.size()) != var.cardinality)
        throw ParseError(Kind::Syntax, key.line, key.column,
                         "expected " + std::to_string(var.cardinality) + " values");
      for (int s = 0; s < var.cardinality; ++s) {
        if (*uncertain && values[s] <= 0.0)
          throw ParseError(Kind::Domain, key.line, key.column,
                           "alphas must be positive");
        if (!*uncertain && values[s] < 0.0)
          throw ParseError(Kind::Domain, key.line, key.column,
                           "probabilities must be nonnegative");
        table(config, s) = values[s];
      }
      if (!*uncertain && std::abs(table.row(config).sum() - 1.0) > 1e-12)
        throw ParseError(Kind::RowSum, key.line, key.column,
                         "row sums to " + format_double(table.row(config).sum()));
    }
    for (int r = 0; r < rows; ++r)
      if (!seen[r])
        throw ParseError(Kind::MissingRow, block.header.line, block.header.column,
                         "table for '" + var.name + "' lacks row " + std::to_string(r));
    tables[v] = std::move(table);
    have_table[v] = true;
  }
  for (int v = 0; v < structure.num_variables(); ++v)
    if (!have_table[v])
      throw ParseError(Kind::MissingRow, 0, 0,
                       "no table for variable '" + structure.variable(v).name + "'");

  if (*uncertain) return UncertainNetwork(std::move(structure), std::move(tables));
  return ConcreteNetwork(std::move(structure), std::move(tables));
}

namespace {

void serialize_common(std::ostream& out, const NetworkStructure& structure,
                      const std::vector<MatrixXd>& tables, bool uncertain) {
  out << "sobn-network 1\n";
  out << "kind " << (uncertain ? "uncertain" : "concrete") << "\n";
  for (const Variable& var : structure.variables()) {
    out << "variable " << var.name << " :";
    for (const std::string& s : var.state_names) out << " " << s;
    out << "\n";
  }
  for (const Variable& var : structure.variables()) {
    if (structure.parents(var.id).empty()) continue;
    out << "parents " << var.name << " :";
    for (int p : structure.parents(var.id)) out << " " << structure.variable(p).name;
    out << "\n";
  }
  for (const Variable& var : structure.variables()) {
    out << (uncertain ? "alphas " : "probabilities ") << var.name << "\n";
    const MatrixXd& table = tables[var.id];
    const std::vector<int>& plist = structure.parents(var.id);
    const std::vector<int> cards = structure.parent_cardinalities(var.id);
    for (int r = 0; r < table.rows(); ++r) {
      if (plist.empty()) {
        out << ".";
      } else {
        const std::vector<int> states = parent_config_unindex(r, cards);
        for (std::size_t k = 0; k < states.size(); ++k) {
          if (k > 0) out << ",";
          out << structure.variable(plist[k]).state_names[states[k]];
        }
      }
      out << " :";
      for (int s = 0; s < table.cols(); ++s) out << " " << format_double(table(r, s));
      out << "\n";
    }
    out << "end\n";
  }
}

}  // namespace

std::string serialize_network(const ConcreteNetwork& network) {
  std::ostringstream out;
  serialize_common(out, network.structure(), network.tables(), false);
  return out.str();
}

std::string serialize_network(const UncertainNetwork& network) {
  std::ostringstream out;
  serialize_common(out, network.structure(), network.tables(), true);
  return out.str();
}

std::string serialize_network(const ParsedNetwork& network) {
  if (std::holds_alternative<ConcreteNetwork>(network))
    return serialize_network(std::get<ConcreteNetwork>(network));
  return serialize_network(std::get<UncertainNetwork>(network));
}

Evidence parse_evidence(const NetworkStructure& structure,
                        const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  expect_header(lines, "sobn-evidence");
  Evidence evidence;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& t = lines[i].tokens;
    if (t.size() != 2)
      throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                       "expected: VARIABLE STATE");
    const int id = structure.variable_index(t[0].text);
    if (id < 0)
      throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                       "unknown variable '" + t[0].text + "'");
    if (evidence.observed(id))
      throw ParseError(Kind::DuplicateVariable, t[0].line, t[0].column, t[0].text);
    const int state = structure.state_index(id, t[1].text);
    if (state < 0)
      throw ParseError(Kind::Syntax, t[1].line, t[1].column,
                       "unknown state '" + t[1].text + "'");
    evidence.set(id, state);
  }
  return evidence;
}

std::string serialize_evidence(const NetworkStructure& structure,
                               const Evidence& evidence) {
  std::ostringstream out;
  out << "sobn-evidence 1\n";
  for (const auto& [id, state] : evidence.assignments())
    out << structure.variable(id).name << " "
        << structure.variable(id).state_names[state] << "\n";
  return out.str();
}

Dataset parse_dataset(const NetworkStructure& structure,
                      const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  expect_header(lines, "sobn-dataset");
  if (lines.size() < 2)
    throw ParseError(Kind::Syntax, 0, 0, "dataset lacks a header row");
  const auto& header = lines[1].tokens;
  if (static_cast<int>(header.size()) != structure.num_variables())
    throw ParseError(Kind::Syntax, header[0].line, header[0].column,
                     "header must list every variable once");
  std::vector<int> columns(header.size());  // column -> variable id
  std::vector<bool> used(structure.num_variables(), false);
  for (std::size_t k = 0; k < header.size(); ++k) {
    const int id = structure.variable_index(header[k].text);
    if (id < 0)
      throw ParseError(Kind::Syntax, header[k].line, header[k].column,
                       "unknown variable '" + header[k].text + "'");
    if (used[id])
      throw ParseError(Kind::DuplicateVariable, header[k].line, header[k].column,
                       header[k].text);
    used[id] = true;
    columns[k] = id;
  }
  Dataset data;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto& t = lines[i].tokens;
    if (t.size() != header.size())
      throw ParseError(Kind::Syntax, t[0].line, t[0].column,
                       "row width does not match the header");
    std::vector<int> row(structure.num_variables(), -1);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const int state = structure.state_index(columns[k], t[k].text);
      if (state < 0)
        throw ParseError(Kind::Syntax, t[k].line, t[k].column,
                         "unknown state '" + t[k].text + "'");
      row[columns[k]] = state;
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::string serialize_dataset(const NetworkStructure& structure,
                              const Dataset& dataset) {
  std::ostringstream out;
  out << "sobn-dataset 1\n";
  for (int v = 0; v < structure.num_variables(); ++v)
    out << (v ? " " : "") << structure.variable(v).name;
  out << "\n";
  for (const std::vector<int>& row : dataset.rows) {
    for (int v = 0; v < structure.num_variables(); ++v)
      out << (v ? " " : "") << structure.variable(v).state_names[row[v]];
    out << "\n";
  }
  return out.str();
}

}  // namespace sobn
