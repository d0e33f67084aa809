#include "sobn/spn.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sobn/dirichlet.hpp"
#include "sobn/errors.hpp"

namespace sobn {

class SpnCompiler {
 public:
  SpnCompiler(const NetworkStructure& structure,
              const std::vector<int>& elimination_order)
      : structure_(structure), order_(elimination_order) {
    if (order_.empty()) order_ = default_order();
    validate_order();
  }

  Spn compile() {
    build_leaves();
    build_initial_factors();
    for (int v : order_) eliminate(v);
    // every remaining factor is scalar; their product is the root
    std::vector<int> scalars;
    for (const Factor& f : factors_)
      scalars.push_back(f.entries.at(0));
    spn_.root_ = make_product(scalars);
    return std::move(spn_);
  }

 private:
  struct Factor {
    std::vector<int> scope;    // ascending variable ids
    std::vector<int> cards;    // cardinality per scope entry
    std::vector<int> entries;  // node ids, mixed-radix over the scope
  };

  int add_node(Spn::NodeKind kind, std::vector<int> children, int variable = -1,
               int state = -1, int config = -1) {
    spn_.nodes_.push_back(
        Spn::Node{kind, std::move(children), variable, state, config});
    return static_cast<int>(spn_.nodes_.size()) - 1;
  }

  int make_product(std::vector<int> children) {
    if (children.size() == 1) return children[0];
    return add_node(Spn::NodeKind::Product, std::move(children));
  }

  int make_sum(std::vector<int> children) {
    if (children.size() == 1) return children[0];
    return add_node(Spn::NodeKind::Sum, std::move(children));
  }

  void build_leaves() {
    const int n = structure_.num_variables();
    spn_.cards_.resize(n);
    spn_.indicator_ids_.resize(n);
    spn_.param_ids_.resize(n);
    for (int v = 0; v < n; ++v) {
      const int card = structure_.variable(v).cardinality;
      spn_.cards_[v] = card;
      for (int s = 0; s < card; ++s)
        spn_.indicator_ids_[v].push_back(
            add_node(Spn::NodeKind::Indicator, {}, v, s));
      const int rows = structure_.row_count(v);
      spn_.param_ids_[v].resize(rows);
      for (int r = 0; r < rows; ++r)
        for (int s = 0; s < card; ++s)
          spn_.param_ids_[v][r].push_back(
              add_node(Spn::NodeKind::Parameter, {}, v, s, r));
    }
  }

  // One factor per variable over {v} and its parents, each entry the product
  // of the matching parameter leaf and the variable's indicator.
  void build_initial_factors() {
    for (int v = 0; v < structure_.num_variables(); ++v) {
      Factor factor;
      factor.scope = structure_.parents(v);
      factor.scope.push_back(v);
      std::sort(factor.scope.begin(), factor.scope.end());
      for (int w : factor.scope)
        factor.cards.push_back(structure_.variable(w).cardinality);

      const std::vector<int>& plist = structure_.parents(v);
      const std::vector<int> pcards = structure_.parent_cardinalities(v);
      std::vector<int> states(factor.scope.size(), 0);
      const long long count = config_count(factor.cards);
      for (long long i = 0; i < count; ++i) {
        int child_state = 0;
        std::vector<int> parent_states(plist.size(), 0);
        for (std::size_t k = 0; k < factor.scope.size(); ++k) {
          const int w = factor.scope[k];
          if (w == v) {
            child_state = states[k];
          } else {
            const auto pos = std::find(plist.begin(), plist.end(), w);
            parent_states[pos - plist.begin()] = states[k];
          }
        }
        const int row = parent_config_index(parent_states, pcards);
        factor.entries.push_back(
            make_product({spn_.param_ids_[v][row][child_state],
                          spn_.indicator_ids_[v][child_state]}));
        next_config(states, factor.cards);
      }
      factors_.push_back(std::move(factor));
    }
  }

  void eliminate(int v) {
    std::vector<Factor> involved;
    for (std::size_t i = 0; i < factors_.size();) {
      if (std::find(factors_[i].scope.begin(), factors_[i].scope.end(), v) !=
          factors_[i].scope.end()) {
        involved.push_back(std::move(factors_[i]));
        factors_.erase(factors_.begin() + i);
      } else {
        ++i;
      }
    }

    // joint scope of the product
    std::set<int> scope_set;
    for (const Factor& f : involved) scope_set.insert(f.scope.begin(), f.scope.end());
    Factor joint;
    joint.scope.assign(scope_set.begin(), scope_set.end());
    for (int w : joint.scope) joint.cards.push_back(structure_.variable(w).cardinality);
    if (config_count(joint.cards) > Spn::kFactorGuard)
      throw CapacityError("spn compile: intermediate factor exceeds 2^25 entries");

    std::vector<int> states(joint.scope.size(), 0);
    const long long count = config_count(joint.cards);
    joint.entries.reserve(count);
    for (long long i = 0; i < count; ++i) {
      std::vector<int> children;
      children.reserve(involved.size());
      for (const Factor& f : involved)
        children.push_back(f.entries[restricted_index(f, joint.scope, states)]);
      joint.entries.push_back(make_product(std::move(children)));
      next_config(states, joint.cards);
    }

    // sum v out of the joint factor
    const auto v_pos = std::find(joint.scope.begin(), joint.scope.end(), v) -
                       joint.scope.begin();
    const int v_card = joint.cards[v_pos];
    Factor reduced;
    for (std::size_t k = 0; k < joint.scope.size(); ++k) {
      if (static_cast<long>(k) == v_pos) continue;
      reduced.scope.push_back(joint.scope[k]);
      reduced.cards.push_back(joint.cards[k]);
    }
    std::vector<int> rstates(reduced.scope.size(), 0);
    const long long rcount = config_count(reduced.cards);
    reduced.entries.reserve(rcount);
    for (long long i = 0; i < rcount; ++i) {
      std::vector<int> full(joint.scope.size(), 0);
      for (std::size_t k = 0, rk = 0; k < joint.scope.size(); ++k)
        if (static_cast<long>(k) != v_pos) full[k] = rstates[rk++];
      std::vector<int> children;
      children.reserve(v_card);
      for (int s = 0; s < v_card; ++s) {
        full[v_pos] = s;
        children.push_back(joint.entries[parent_config_index(full, joint.cards)]);
      }
      reduced.entries.push_back(make_sum(std::move(children)));
      next_config(rstates, reduced.cards);
    }
    factors_.push_back(std::move(reduced));
  }

  // Index into factor `f` of the configuration `states` given over `scope`.
  int restricted_index(const Factor& f, const std::vector<int>& scope,
                       const std::vector<int>& states) const {
    std::vector<int> fstates(f.scope.size(), 0);
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
      const auto pos = std::find(scope.begin(), scope.end(), f.scope[k]) -
                       scope.begin();
      fstates[k] = states[pos];
    }
    return parent_config_index(fstates, f.cards);
  }

  // Sinks first; min-fill on the interaction graph among the candidates,
  // smallest id on ties.
  std::vector<int> default_order() const {
    const int n = structure_.num_variables();
    std::vector<std::set<int>> adjacent(n);
    for (int v = 0; v < n; ++v) {
      std::vector<int> clique = structure_.parents(v);
      clique.push_back(v);
      for (int a : clique)
        for (int b : clique)
          if (a != b) adjacent[a].insert(b);
    }
    std::vector<int> remaining_children(n);
    for (int v = 0; v < n; ++v)
      remaining_children[v] = static_cast<int>(structure_.children(v).size());
    std::vector<bool> eliminated(n, false);
    std::vector<int> order;
    order.reserve(n);
    for (int step = 0; step < n; ++step) {
      int best = -1;
      long best_fill = -1;
      for (int v = 0; v < n; ++v) {
        if (eliminated[v] || remaining_children[v] > 0) continue;
        long fill = 0;
        for (int a : adjacent[v])
          for (int b : adjacent[v])
            if (a < b && !adjacent[a].count(b)) ++fill;
        if (best < 0 || fill < best_fill) {
          best = v;
          best_fill = fill;
        }
      }
      order.push_back(best);
      eliminated[best] = true;
      for (int a : adjacent[best])
        for (int b : adjacent[best])
          if (a != b) adjacent[a].insert(b);
      for (int a : adjacent[best]) adjacent[a].erase(best);
      for (int p : structure_.parents(best)) --remaining_children[p];
    }
    return order;
  }

  void validate_order() const {
    if (static_cast<int>(order_.size()) != structure_.num_variables())
      throw std::invalid_argument("spn compile: order must list every variable");
    std::set<int> seen(order_.begin(), order_.end());
    if (static_cast<int>(seen.size()) != structure_.num_variables() ||
        *seen.begin() < 0 ||
        *seen.rbegin() >= structure_.num_variables())
      throw std::invalid_argument("spn compile: order must be a permutation");
  }

  const NetworkStructure& structure_;
  std::vector<int> order_;
  Spn spn_;
  std::vector<Factor> factors_;
};

Spn Spn::compile(const NetworkStructure& structure) {
  return SpnCompiler(structure, {}).compile();
}

Spn Spn::compile(const NetworkStructure& structure,
                 const std::vector<int>& elimination_order) {
  return SpnCompiler(structure, elimination_order).compile();
}

long long Spn::edge_count() const {
  long long edges = 0;
  for (const Node& node : nodes_) edges += static_cast<long long>(node.children.size());
  return edges;
}

Spn::Evaluation Spn::forward(const std::vector<MatrixXd>& tables,
                             const Evidence& evidence) const {
  Evaluation eval;
  eval.values.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    switch (node.kind) {
      case NodeKind::Indicator:
        eval.values[i] = (!evidence.observed(node.variable) ||
                          evidence.state(node.variable) == node.state)
                             ? 1.0
                             : 0.0;
        break;
      case NodeKind::Parameter:
        eval.values[i] = tables[node.variable](node.config, node.state);
        break;
      case NodeKind::Sum: {
        double total = 0.0;
        for (int c : node.children) total += eval.values[c];
        eval.values[i] = total;
        break;
      }
      case NodeKind::Product: {
        double product = 1.0;
        for (int c : node.children) product *= eval.values[c];
        eval.values[i] = product;
        break;
      }
    }
  }
  eval.root_value = eval.values[root_];
  return eval;
}

void Spn::backward(Evaluation& eval) const {
  eval.derivatives = VectorXd::Zero(nodes_.size());
  eval.derivatives[root_] = 1.0;
  std::vector<double> prefix, suffix;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const Node& node = nodes_[i];
    const double d = eval.derivatives[i];
    if (node.kind == NodeKind::Sum) {
      if (d == 0.0) continue;
      for (int c : node.children) eval.derivatives[c] += d;
    } else if (node.kind == NodeKind::Product) {
      if (d == 0.0) continue;
      const std::size_t k = node.children.size();
      prefix.assign(k + 1, 1.0);
      suffix.assign(k + 1, 1.0);
      for (std::size_t j = 0; j < k; ++j)
        prefix[j + 1] = prefix[j] * eval.values[node.children[j]];
      for (std::size_t j = k; j-- > 0;)
        suffix[j] = suffix[j + 1] * eval.values[node.children[j]];
      for (std::size_t j = 0; j < k; ++j)
        eval.derivatives[node.children[j]] += d * prefix[j] * suffix[j + 1];
    }
  }
}

double Spn::parameter_derivative(const Evaluation& eval, int variable,
                                 int config, int state) const {
  return eval.derivatives[param_ids_[variable][config][state]];
}

VectorXd Spn::joint_marginal(const Evaluation& eval,
                             const std::vector<MatrixXd>& tables,
                             int variable) const {
  const int card = cards_[variable];
  VectorXd joint = VectorXd::Zero(card);
  for (std::size_t r = 0; r < param_ids_[variable].size(); ++r)
    for (int s = 0; s < card; ++s)
      joint[s] += eval.derivatives[param_ids_[variable][r][s]] *
                  tables[variable](r, s);
  return joint;
}

std::string Spn::dump() const {
  std::ostringstream out;
  out << "sobn-circuit 1\n";
  out << "nodes " << nodes_.size() << "\n";
  out << "root " << root_ << "\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    out << i;
    switch (node.kind) {
      case NodeKind::Indicator:
        out << " indicator " << node.variable << " " << node.state;
        break;
      case NodeKind::Parameter:
        out << " parameter " << node.variable << " " << node.config << " "
            << node.state;
        break;
      case NodeKind::Sum:
        out << " sum";
        for (int c : node.children) out << " " << c;
        break;
      case NodeKind::Product:
        out << " product";
        for (int c : node.children) out << " " << c;
        break;
    }
    out << "\n";
  }
  return out.str();
}

std::vector<MarginalEstimate> sospn_query(const Spn& spn,
                                          const NetworkStructure& structure,
                                          const NetworkMoments& moments,
                                          const Evidence& evidence) {
  evidence.validate(structure);
  const int n = structure.num_variables();
  std::vector<MatrixXd> tables(n);
  for (int v = 0; v < n; ++v) {
    const auto& rows = moments.tables[v].rows;
    MatrixXd table(rows.size(), structure.variable(v).cardinality);
    for (std::size_t r = 0; r < rows.size(); ++r)
      table.row(r) = rows[r].mean.transpose();
    tables[v] = std::move(table);
  }

  Spn::Evaluation base = spn.forward(tables, evidence);
  const double p_evidence = base.root_value;
  if (!(p_evidence > 0.0))
    throw InconsistentEvidenceError("sospn: evidence has probability zero at the means");
  spn.backward(base);

  std::vector<MarginalEstimate> estimates(n);
  for (int v = 0; v < n; ++v) {
    const int card = structure.variable(v).cardinality;
    estimates[v].variable = v;
    if (evidence.observed(v)) {
      estimates[v].mean = VectorXd::Zero(card);
      estimates[v].mean[evidence.state(v)] = 1.0;
      estimates[v].cov = MatrixXd::Zero(card, card);
      continue;
    }

    // mean via the derivative identity at the row means
    VectorXd joint = spn.joint_marginal(base, tables, v);
    const double total = joint.sum();
    if (!(total > 0.0))
      throw InconsistentEvidenceError("sospn: queried marginal has zero mass");
    estimates[v].mean = joint / total;

    // per-state evaluations with the evidence extended by Y = y
    std::vector<Spn::Evaluation> extended(card);
    VectorXd p_joint(card);
    for (int s = 0; s < card; ++s) {
      Evidence ext = evidence;
      ext.set(v, s);
      extended[s] = spn.forward(tables, ext);
      spn.backward(extended[s]);
      p_joint[s] = extended[s].root_value;
    }

    // delta-method over the ratio g_y = p(y, e) / p(e), row by row
    MatrixXd cov = MatrixXd::Zero(card, card);
    const double inv_sq = 1.0 / (p_evidence * p_evidence);
    for (int w = 0; w < n; ++w) {
      const int wcard = structure.variable(w).cardinality;
      for (int r = 0; r < static_cast<int>(moments.tables[w].rows.size()); ++r) {
        MatrixXd J(card, wcard);
        for (int y = 0; y < card; ++y)
          for (int k = 0; k < wcard; ++k) {
            const double dj = spn.parameter_derivative(extended[y], w, r, k);
            const double de = spn.parameter_derivative(base, w, r, k);
            J(y, k) = (p_evidence * dj - p_joint[y] * de) * inv_sq;
          }
        cov += J * moments.tables[w].rows[r].cov * J.transpose();
      }
    }
    estimates[v].cov = ((cov + cov.transpose()) / 2.0).eval();
  }
  return estimates;
}

std::vector<MarginalEstimate> sospn_query(const Spn& spn,
                                          const UncertainNetwork& network,
                                          const Evidence& evidence) {
  return sospn_query(spn, network.structure(), moments_of(network), evidence);
}

}  // namespace sobn
