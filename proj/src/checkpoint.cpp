#include "cyberdef/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cyberdef/env.hpp"
#include "cyberdef/errors.hpp"

namespace cyberdef {

namespace {

constexpr const char* kMagic = "cyberdef-checkpoint";

std::string join_sizes(const std::vector<int>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out;
}

void copy_checked(PolicyNet& dst, const PolicyNet& src, const std::string& name) {
  const auto& a = dst.sizes();
  const auto& b = src.sizes();
  if (a.size() != b.size())
    throw LoadError("layout mismatch for " + name + ": expected " + std::to_string(a.size() - 1) +
                    " layers, checkpoint has " + std::to_string(b.size() - 1));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    const std::string what = i == 0 ? "input size" : i + 1 == a.size() ? "output size" : "hidden layer " + std::to_string(i) + " width";
    throw LoadError("layout mismatch for " + name + ": " + what + " expected " + std::to_string(a[i]) +
                    ", checkpoint has " + std::to_string(b[i]) + " (sizes [" + join_sizes(a) + "] vs [" +
                    join_sizes(b) + "])");
  }
  dst.parameters() = src.parameters();
}

template <typename F>
void for_each_net(Team& team, F f) {
  for (auto& a : team.agents) {
    for (auto& u : a.units) {
      f(u.name + "/actor", u.actor, true);
      if (u.critic) f(u.name + "/critic", *u.critic, true);
    }
    if (a.master) {
      f(a.master->name + "/actor", a.master->actor, false);
      f(a.master->name + "/critic", *a.master->critic, false);
    }
  }
  if (team.central_critic) f(std::string("central/critic"), *team.central_critic, false);
}

}  // namespace

const PolicyNet* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, net] : nets)
    if (n == name) return &net;
  return nullptr;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw LoadError("cannot write checkpoint " + path);
    out << kMagic << ' ' << ckpt.version << '\n';
    out << "iteration " << ckpt.iteration << '\n';
    for (const auto& [k, v] : ckpt.meta) out << "meta " << k << ' ' << v << '\n';
    char buf[64];
    for (const auto& [name, net] : ckpt.nets) {
      out << "net " << name << ' ' << (net.activation() == Activation::Tanh ? "tanh" : "relu") << ' '
          << net.sizes().size();
      for (int s : net.sizes()) out << ' ' << s;
      out << '\n' << "params " << net.parameter_count();
      for (Eigen::Index i = 0; i < net.parameters().size(); ++i) {
        std::snprintf(buf, sizeof buf, " %a", net.parameters()[i]);
        out << buf;
      }
      out << '\n';
    }
    if (!out) throw LoadError("failed writing checkpoint " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw LoadError("cannot move checkpoint into " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("checkpoint not found: " + path);
  Checkpoint c;
  std::string line;
  if (!std::getline(in, line)) throw LoadError("empty checkpoint " + path);
  {
    std::istringstream hs(line);
    std::string magic;
    hs >> magic >> c.version;
    if (magic != kMagic) throw LoadError(path + " is not a checkpoint");
    if (c.version != 1) throw LoadError("unsupported checkpoint version " + std::to_string(c.version));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "iteration") {
      ls >> c.iteration;
    } else if (tag == "meta") {
      std::string k, v;
      ls >> k;
      std::getline(ls >> std::ws, v);
      c.meta[k] = v;
    } else if (tag == "net") {
      std::string name, act;
      std::size_t n = 0;
      ls >> name >> act >> n;
      std::vector<int> sizes(n);
      for (auto& s : sizes) ls >> s;
      if (!ls || n < 2) throw LoadError("malformed network header in " + path + ": " + line);
      PolicyNet net(sizes, act == "relu" ? Activation::Relu : Activation::Tanh);
      std::string pline;
      if (!std::getline(in, pline)) throw LoadError("missing parameters for " + name);
      std::istringstream ps(pline);
      std::string ptag;
      std::size_t count = 0;
      ps >> ptag >> count;
      if (ptag != "params" || count != net.parameter_count())
        throw LoadError("parameter count mismatch for " + name + " in " + path);
      std::string tok;
      for (std::size_t i = 0; i < count; ++i) {
        if (!(ps >> tok)) throw LoadError("truncated parameters for " + name);
        net.parameters()[static_cast<Eigen::Index>(i)] = std::strtod(tok.c_str(), nullptr);
      }
      c.nets.emplace_back(name, std::move(net));
    } else {
      throw LoadError("unknown checkpoint record '" + tag + "' in " + path);
    }
  }
  return c;
}

Checkpoint team_checkpoint(const Team& team, std::int64_t iteration) {
  Checkpoint c;
  c.iteration = iteration;
  c.meta["strategy"] = std::string(to_string(team.spec.strategy));
  c.meta["master"] = std::string(to_string(team.spec.master));
  std::string reg;
  for (auto id : team.spec.registry) reg += (reg.empty() ? "" : ",") + std::string(to_string(id));
  c.meta["registry"] = reg.empty() ? "-" : reg;
  c.meta["agents"] = std::to_string(team.agents.size());
  if (!team.agents.empty() && !team.agents[0].units.empty()) {
    const auto& sizes = team.agents[0].units[0].actor.net.sizes();
    if (sizes.size() > 2) c.meta["hidden"] = std::to_string(sizes[1]);
  }
  for_each_net(const_cast<Team&>(team), [&](const std::string& name, Learner& l, bool) {
    c.nets.emplace_back(name, l.net);
  });
  return c;
}

void restore_team(Team& team, const Checkpoint& ckpt, bool required) {
  for_each_net(team, [&](const std::string& name, Learner& l, bool) {
    const PolicyNet* src = ckpt.find(name);
    if (!src) {
      if (required) throw LoadError("checkpoint has no network " + name);
      return;
    }
    copy_checked(l.net, *src, name);
    l.opt = Optimizer(l.opt.kind(), l.net.parameter_count());
  });
}

void restore_subpolicies(Team& team, const Checkpoint& ckpt) {
  for_each_net(team, [&](const std::string& name, Learner& l, bool unit) {
    if (!unit) return;
    const PolicyNet* src = ckpt.find(name);
    if (!src) throw LoadError("checkpoint has no network " + name);
    copy_checked(l.net, *src, name);
    l.opt = Optimizer(l.opt.kind(), l.net.parameter_count());
  });
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes.data(), bytes.size())));
  return buf;
}

}  // namespace cyberdef
