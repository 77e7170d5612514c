#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fsmprint/mealy.hpp"

namespace fsmprint {

namespace dot_detail {

enum class Tok { Id, LBrace, RBrace, LBracket, RBracket, Equals, Semi, Comma, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space_and_comments();
    const std::size_t line = line_, col = col_;
    if (pos_ >= src_.size()) return {Tok::End, {}, line, col};
    const char c = src_[pos_];
    auto single = [&](Tok t) {
      advance();
      return Token{t, std::string(1, c), line, col};
    };
    switch (c) {
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case '=': return single(Tok::Equals);
      case ';': return single(Tok::Semi);
      case ',': return single(Tok::Comma);
      default: break;
    }
    if (c == '-' && peek(1) == '>') {
      advance();
      advance();
      return {Tok::Arrow, "->", line, col};
    }
    if (c == '"') {
      advance();
      std::string text;
      while (true) {
        if (pos_ >= src_.size()) throw ParseError("unterminated string", line, col);
        const char d = src_[pos_];
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\\' && (peek(1) == '"' || peek(1) == '\\')) {
          advance();
          text += src_[pos_];
          advance();
          continue;
        }
        text += d;
        advance();
      }
      return {Tok::Id, std::move(text), line, col};
    }
    if (is_id_char(c) || c == '-') {
      std::string text;
      while (pos_ < src_.size() && (is_id_char(src_[pos_]) || src_[pos_] == '-') &&
             !(src_[pos_] == '-' && peek(1) == '>')) {
        text += src_[pos_];
        advance();
      }
      return {Tok::Id, std::move(text), line, col};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

private:
  static bool is_id_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' || (c == '/' && peek(1) == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (pos_ < src_.size() && !(src_[pos_] == '*' && peek(1) == '/')) advance();
        if (pos_ < src_.size()) {
          advance();
          advance();
        }
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct Attr {
  std::string value;
  std::size_t line;
  std::size_t column;
};

using Attrs = std::map<std::string, Attr>;

class Parser {
public:
  explicit Parser(std::string_view src) : lex_(src) { shift(); }

  PartialMealy parse() {
    if (cur_.kind == Tok::Id && cur_.text == "strict") shift();
    if (cur_.kind != Tok::Id || (cur_.text != "digraph" && cur_.text != "graph"))
      fail("expected 'digraph'");
    shift();
    if (cur_.kind == Tok::Id) shift();
    expect(Tok::LBrace, "'{'");
    while (cur_.kind != Tok::RBrace) {
      if (cur_.kind == Tok::End) fail("unexpected end of input, expected '}'");
      statement();
    }
    shift();
    if (cur_.kind != Tok::End) fail("trailing content after graph");
    return finish();
  }

private:
  struct EdgeStmt {
    std::string src, dst;
    Attrs attrs;
    std::size_t line, column;
  };

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur_.line, cur_.column); }

  void shift() { cur_ = lex_.next(); }

  Token expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what);
    Token t = cur_;
    shift();
    return t;
  }

  Attrs attr_lists() {
    Attrs attrs;
    while (cur_.kind == Tok::LBracket) {
      shift();
      while (cur_.kind != Tok::RBracket) {
        const Token key = expect(Tok::Id, "attribute name");
        expect(Tok::Equals, "'='");
        const Token value = expect(Tok::Id, "attribute value");
        attrs[key.text] = Attr{value.text, value.line, value.column};
        if (cur_.kind == Tok::Comma || cur_.kind == Tok::Semi) shift();
      }
      shift();
    }
    return attrs;
  }

  static bool is_start(const std::string& id) { return id.rfind("__start", 0) == 0; }

  void note_node(const std::string& id, std::size_t line, std::size_t column) {
    if (is_start(id) || node_pos_.count(id)) return;
    node_order_.push_back(id);
    node_pos_[id] = {line, column};
  }

  void statement() {
    const Token first = expect(Tok::Id, "statement");
    if ((first.text == "graph" || first.text == "node" || first.text == "edge") &&
        cur_.kind == Tok::LBracket) {
      attr_lists();
    } else if (cur_.kind == Tok::Equals) {
      shift();
      expect(Tok::Id, "value");
    } else if (cur_.kind == Tok::Arrow) {
      shift();
      const Token dst = expect(Tok::Id, "edge target");
      if (cur_.kind == Tok::Arrow) fail("edge chains are not supported");
      EdgeStmt e{first.text, dst.text, attr_lists(), first.line, first.column};
      note_node(e.src, first.line, first.column);
      note_node(e.dst, dst.line, dst.column);
      edges_.push_back(std::move(e));
    } else {
      Attrs attrs = attr_lists();
      note_node(first.text, first.line, first.column);
      if (auto it = attrs.find("label"); it != attrs.end() && !it->second.value.empty())
        labels_[first.text] = it->second.value;
    }
    if (cur_.kind == Tok::Semi) shift();
  }

  PartialMealy finish() {
    PartialMealy pm;
    std::unordered_map<std::string, StateId> ids;
    // Display labels become state names unless they collide.
    std::map<std::string, int> label_uses;
    for (const auto& id : node_order_) ++label_uses[labels_.count(id) ? labels_[id] : id];
    for (const auto& id : node_order_) {
      std::string name = labels_.count(id) ? labels_[id] : id;
      if (label_uses[name] > 1) name = id;
      ids[id] = pm.add_state(name);
    }
    std::optional<std::pair<std::size_t, std::size_t>> start_pos;
    for (const auto& e : edges_) {
      if (is_start(e.src)) {
        if (start_pos) throw ParseError("more than one initial-state edge", e.line, e.column);
        if (is_start(e.dst)) throw ParseError("initial edge must target a state", e.line, e.column);
        start_pos = {e.line, e.column};
        pm.set_initial(ids.at(e.dst));
        continue;
      }
      if (is_start(e.dst)) throw ParseError("edge into the start marker", e.line, e.column);
      auto it = e.attrs.find("label");
      if (it == e.attrs.end()) throw ParseError("transition without label", e.line, e.column);
      const auto& label = it->second;
      const auto slash = label.value.find('/');
      if (slash == std::string::npos || label.value.find('/', slash + 1) != std::string::npos)
        throw ParseError("label '" + label.value + "' must contain exactly one '/'", label.line,
                         label.column);
      const std::string input = label.value.substr(0, slash);
      const std::string output = label.value.substr(slash + 1);
      if (input.empty()) throw ParseError("empty input symbol", label.line, label.column);
      const Symbol a = pm.add_input(input);
      const StateId q = ids.at(e.src);
      if (pm.defined(q, a))
        throw NonDeterministicEdge("duplicate transition from '" + e.src + "' on '" + input + "'",
                                   e.line, e.column);
      pm.set_transition(q, a, ids.at(e.dst), output);
    }
    if (!start_pos) throw MissingInitial("no '__start0 -> <state>' edge", cur_.line, cur_.column);
    return pm;
  }

  Lexer lex_;
  Token cur_{};
  std::vector<std::string> node_order_;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> node_pos_;
  std::unordered_map<std::string, std::string> labels_;
  std::vector<EdgeStmt> edges_;

public:
  std::pair<std::size_t, std::size_t> position_of(const std::string& state_name) const {
    for (const auto& [id, pos] : node_pos_)
      if (id == state_name || (labels_.count(id) && labels_.at(id) == state_name)) return pos;
    return {1, 1};
  }
};

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace dot_detail

/// Parses a DOT description that may leave transitions undefined.
inline PartialMealy parse_dot_partial(std::string_view text) {
  return dot_detail::Parser(text).parse();
}

/// Parses a complete machine in the usual automata-learning DOT layout:
/// a hidden `__start0` node pointing at the initial state and one
/// `src -> dst [label="input/output"]` edge per transition.
inline MealyMachine parse_dot(std::string_view text) {
  dot_detail::Parser parser(text);
  PartialMealy pm = parser.parse();
  if (auto hole = pm.first_hole()) {
    const auto& name = pm.state_names()[hole->first];
    const auto [line, col] = parser.position_of(name);
    throw ParseError("state '" + name + "' has no transition on '" + pm.inputs()[hole->second] +
                         "'",
                     line, col);
  }
  return pm.build();
}

/// Deterministic DOT rendering: node ids s0..sN-1 in state order, the
/// original names as labels, edges in (state, input) order.
inline std::string serialize_dot(const MealyMachine& m) {
  using dot_detail::quote;
  for (const auto& s : m.inputs().symbols())
    if (s.find('/') != std::string::npos) throw InvalidMachine("input symbol contains '/': " + s);
  for (const auto& s : m.outputs())
    if (s.find('/') != std::string::npos) throw InvalidMachine("output symbol contains '/': " + s);
  std::ostringstream os;
  os << "digraph g {\n";
  os << "  __start0 [label=\"\" shape=\"none\"];\n";
  for (StateId q = 0; q < m.num_states(); ++q)
    os << "  s" << q << " [shape=\"circle\" label=" << quote(m.state_name(q)) << "];\n";
  for (StateId q = 0; q < m.num_states(); ++q)
    for (Symbol a = 0; a < m.num_inputs(); ++a)
      os << "  s" << q << " -> s" << m.successor(q, a)
         << " [label=" << quote(m.inputs()[a] + "/" + m.output(q, a)) << "];\n";
  os << "  __start0 -> s" << m.initial() << ";\n";
  os << "}\n";
  return os.str();
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MealyMachine load_dot_file(const std::filesystem::path& path) {
  return parse_dot(read_text_file(path));
}

/// Every `*.dot` file of a directory, sorted by file name.
inline std::vector<std::pair<std::string, MealyMachine>> load_dot_directory(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".dot") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, MealyMachine>> out;
  for (const auto& f : files) out.emplace_back(f.stem().string(), load_dot_file(f));
  return out;
}

}  // namespace fsmprint
