#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsmprint/mealy.hpp"

namespace fsmprint {

/// Prefix-closed record of every observed input/output interaction. Nodes
/// are identified by their access sequence; edges carry the observed output.
class ObservationTree {
public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kRoot = 0;
  static constexpr NodeId kNone = static_cast<NodeId>(-1);

  explicit ObservationTree(std::size_t inputs) : inputs_(inputs) { new_node(kNone, 0, 0); }

  std::size_t num_inputs() const noexcept { return inputs_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  NodeId child(NodeId n, Symbol a) const { return children_[n * inputs_ + a]; }
  NodeId parent(NodeId n) const { return nodes_[n].parent; }
  std::size_t depth(NodeId n) const { return nodes_[n].depth; }
  /// Output id on the edge entering `n`.
  std::uint32_t incoming_output(NodeId n) const { return nodes_[n].output; }
  const std::string& output_name(std::uint32_t id) const { return output_names_[id]; }
  /// Number of nodes below `n`; grows whenever the subtree gains a node.
  std::uint32_t subtree_size(NodeId n) const { return nodes_[n].subtree; }

  /// Output on edge n --a-->, if observed.
  std::optional<std::uint32_t> output(NodeId n, Symbol a) const {
    const NodeId c = child(n, a);
    if (c == kNone) return std::nullopt;
    return nodes_[c].output;
  }

  /// Records a trace; returns the node reached by `w`. Throws
  /// NonDeterministicResponse if it contradicts an earlier observation.
  NodeId insert(const Word& w, const OutputWord& out) {
    NodeId n = kRoot;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::uint32_t o = intern(out[i]);
      NodeId c = child(n, w[i]);
      if (c == kNone) {
        c = new_node(n, w[i], o);
      } else if (nodes_[c].output != o) {
        throw NonDeterministicResponse("observation '" + out[i] + "' contradicts recorded '" +
                                       output_names_[nodes_[c].output] + "'");
      }
      n = c;
    }
    return n;
  }

  /// Node reached by `w`, or kNone.
  NodeId find(const Word& w, NodeId from = kRoot) const {
    NodeId n = from;
    for (auto a : w) {
      if (n == kNone) return kNone;
      n = child(n, a);
    }
    return n;
  }

  Word access(NodeId n) const {
    Word w(nodes_[n].depth);
    for (std::size_t i = w.size(); i > 0; --i) {
      w[i - 1] = nodes_[n].via;
      n = nodes_[n].parent;
    }
    return w;
  }

  /// Recorded outputs along the path to `n`.
  OutputWord outputs_to(NodeId n) const {
    OutputWord out(nodes_[n].depth);
    for (std::size_t i = out.size(); i > 0; --i) {
      out[i - 1] = output_names_[nodes_[n].output];
      n = nodes_[n].parent;
    }
    return out;
  }

  /// Shortest suffix defined below both nodes on which they disagree.
  std::optional<Word> apartness_witness(NodeId a, NodeId b) const {
    struct Item {
      NodeId x, y;
      std::size_t parent;
      Symbol via;
    };
    std::vector<Item> items{{a, b, 0, 0}};
    auto word_of = [&](std::size_t idx, Symbol last) {
      Word w{last};
      while (idx != 0) {
        w.push_back(items[idx].via);
        idx = items[idx].parent;
      }
      std::reverse(w.begin(), w.end());
      return w;
    };
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto [x, y, _, __] = items[i];
      for (Symbol s = 0; s < inputs_; ++s) {
        const NodeId cx = child(x, s), cy = child(y, s);
        if (cx == kNone || cy == kNone) continue;
        if (nodes_[cx].output != nodes_[cy].output) return word_of(i, s);
        items.push_back({cx, cy, i, s});
      }
    }
    return std::nullopt;
  }

  bool apart(NodeId a, NodeId b) const { return apartness_witness(a, b).has_value(); }

private:
  struct Node {
    NodeId parent;
    Symbol via;
    std::uint32_t output;
    std::uint32_t depth;
    std::uint32_t subtree;
  };

  NodeId new_node(NodeId parent, Symbol via, std::uint32_t output) {
    const auto id = static_cast<NodeId>(nodes_.size());
    const std::uint32_t depth = parent == kNone ? 0 : nodes_[parent].depth + 1;
    nodes_.push_back({parent, via, output, depth, 0});
    children_.resize(children_.size() + inputs_, kNone);
    if (parent != kNone) children_[parent * inputs_ + via] = id;
    for (NodeId p = parent; p != kNone; p = nodes_[p].parent) ++nodes_[p].subtree;
    return id;
  }

  std::uint32_t intern(const std::string& o) {
    auto [it, fresh] = output_ids_.emplace(o, static_cast<std::uint32_t>(output_names_.size()));
    if (fresh) output_names_.push_back(o);
    return it->second;
  }

  std::size_t inputs_;
  std::vector<Node> nodes_;
  std::vector<NodeId> children_;
  std::vector<std::string> output_names_;
  std::unordered_map<std::string, std::uint32_t> output_ids_;
};

}  // namespace fsmprint
