#include "famdyn/family.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace famdyn {

using nlohmann::json;

const char* family_kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::iterates: return "iterates";
    case FamilyKind::semigroup: return "semigroup";
    case FamilyKind::sequence: return "sequence";
    case FamilyKind::list: return "list";
  }
  return "?";
}

static FamilyKind kind_from_name(const std::string& s) {
  if (s == "iterates") return FamilyKind::iterates;
  if (s == "semigroup") return FamilyKind::semigroup;
  if (s == "sequence") return FamilyKind::sequence;
  if (s == "list") return FamilyKind::list;
  throw Error(Errc::parse, "unknown family kind '" + s + "'");
}

const std::vector<Complex>& probe_points() {
  static const std::vector<Complex> pts = [] {
    std::vector<Complex> v;
    // fixed generic probes: off-axis, off the unit circle, no symmetry
    for (int j = 0; j < 13; ++j) {
      double t = 2.0 * 3.14159265358979323846 * j / 13.0;
      v.push_back(Complex(0.8 * std::cos(t) + 0.13, 0.8 * std::sin(t) + 0.077));
    }
    return v;
  }();
  return pts;
}

bool expr_is_rational(const Expr& e) {
  if (!e) return true;
  if (e->op == Op::exp_) return false;
  if (e->a && !expr_is_rational(e->a)) return false;
  if (e->b && !expr_is_rational(e->b)) return false;
  return true;
}

// ---- JSON schema ----

static Complex param_point(const json& v, const std::string& key) {
  if (!v.is_string())
    throw Error(Errc::parse, "param '" + key + "' must be a point string");
  XC p = parse_point(v.get<std::string>());
  if (p.is_inf())
    throw Error(Errc::parse, "param '" + key + "' must be finite");
  return p.value();
}

FamilySpec family_from_json_text(const std::string& text) {
  json js;
  try {
    js = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("family file: ") + e.what());
  }
  if (!js.is_object()) throw Error(Errc::parse, "family file: expected an object");

  static const char* known[] = {"name",    "kind",   "expr",       "generators",
                                "members", "params", "index_start"};
  for (auto it = js.begin(); it != js.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok)
      throw Error(Errc::parse, "family file: unknown key '" + it.key() + "'");
  }

  FamilySpec spec;
  if (!js.contains("name") || !js["name"].is_string())
    throw Error(Errc::parse, "family file: 'name' (string) is required");
  spec.name = js["name"].get<std::string>();
  if (!js.contains("kind") || !js["kind"].is_string())
    throw Error(Errc::parse, "family file: 'kind' (string) is required");
  spec.kind = kind_from_name(js["kind"].get<std::string>());

  if (js.contains("params")) {
    if (!js["params"].is_object())
      throw Error(Errc::parse, "family file: 'params' must be an object");
    for (auto it = js["params"].begin(); it != js["params"].end(); ++it)
      spec.params[it.key()] = param_point(it.value(), it.key());
  }
  if (js.contains("index_start")) {
    if (!js["index_start"].is_number_integer())
      throw Error(Errc::parse, "family file: 'index_start' must be an integer");
    spec.index_start = js["index_start"].get<long>();
  }

  auto parse_one = [](const json& v, const char* what) {
    if (!v.is_string())
      throw Error(Errc::parse, std::string("family file: ") + what +
                                   " must be an expression string");
    return parse_expr(v.get<std::string>());
  };

  bool has_expr = js.contains("expr");
  bool has_gens = js.contains("generators");
  bool has_members = js.contains("members");

  switch (spec.kind) {
    case FamilyKind::iterates:
    case FamilyKind::sequence:
      if (!has_expr || has_gens || has_members)
        throw Error(Errc::parse,
                    std::string("family file: kind '") +
                        family_kind_name(spec.kind) + "' takes exactly 'expr'");
      spec.sources.push_back(parse_one(js["expr"], "'expr'"));
      break;
    case FamilyKind::semigroup: {
      if (!has_gens || has_expr || has_members || !js["generators"].is_array() ||
          js["generators"].empty())
        throw Error(Errc::parse,
                    "family file: kind 'semigroup' takes a non-empty "
                    "'generators' array");
      for (const auto& g : js["generators"])
        spec.sources.push_back(parse_one(g, "generator"));
      break;
    }
    case FamilyKind::list: {
      if (!has_members || has_expr || has_gens || !js["members"].is_array() ||
          js["members"].empty())
        throw Error(Errc::parse,
                    "family file: kind 'list' takes a non-empty 'members' array");
      for (const auto& m : js["members"])
        spec.sources.push_back(parse_one(m, "member"));
      break;
    }
  }
  return spec;
}

FamilySpec load_family_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open family file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return family_from_json_text(ss.str());
}

// ---- enumeration ----

void EnumeratedFamily::eval_all(const XC& z, std::vector<EvalResult>& out) const {
  out.assign(members.size(), EvalResult{});
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Member& m = members[i];
    EvalResult r;
    try {
      if (m.apply < 0) {
        r.v = eval_at(m.expr, z);
      } else {
        XC base = z;
        if (m.parent >= 0) {
          const EvalResult& p = out[m.parent];
          if (!p.ok) {
            out[i] = p;
            continue;
          }
          base = p.v;
        }
        r.v = eval_at(bound_sources[m.apply], base);
      }
      r.ok = true;
    } catch (const Error& e) {
      if (e.code == Errc::unbound) throw;
      r.err = e.code;
    }
    out[i] = r;
  }
}

std::vector<EvalResult> EnumeratedFamily::eval_all(const XC& z) const {
  std::vector<EvalResult> out;
  eval_all(z, out);
  return out;
}

void EnumeratedFamily::eval_all_dual(const XC& z,
                                     std::vector<DualResult>& out) const {
  out.assign(members.size(), DualResult{});
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Member& m = members[i];
    DualResult r;
    try {
      if (m.apply < 0) {
        Dual d = eval_dual(m.expr, z);
        r.v = d.v;
        r.d = d.d;
      } else {
        XC base = z;
        XC chain = Complex(1.0);
        if (m.parent >= 0) {
          const DualResult& p = out[m.parent];
          if (!p.ok) {
            out[i] = p;
            continue;
          }
          base = p.v;
          chain = p.d;
        }
        Dual d = eval_dual(bound_sources[m.apply], base);
        r.v = d.v;
        r.d = xc_mul(d.d, chain);
      }
      r.ok = true;
    } catch (const Error& e) {
      if (e.code == Errc::unbound) throw;
      r.err = e.code;
    }
    out[i] = r;
  }
}

static void flag_duplicates(EnumeratedFamily& fam) {
  if (fam.members.size() < 2 || fam.members.size() > 8192) return;
  const auto& probes = probe_points();
  std::vector<std::vector<EvalResult>> cols;  // cols[p][member]
  cols.reserve(probes.size());
  for (const Complex& p : probes) cols.push_back(fam.eval_all(XC(p)));
  auto same = [&](std::size_t i, std::size_t j) {
    for (std::size_t p = 0; p < cols.size(); ++p) {
      const EvalResult& a = cols[p][i];
      const EvalResult& b = cols[p][j];
      if (a.ok != b.ok) return false;
      if (a.ok && chordal(a.v, b.v) > 1e-12) return false;
    }
    return true;
  };
  for (std::size_t i = 1; i < fam.members.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (same(i, j)) {
        fam.members[i].duplicate_of = static_cast<int>(j);
        break;
      }
}

EnumeratedFamily enumerate_family(const FamilySpec& spec, long budget) {
  if (budget < 1) throw Error(Errc::precondition, "family budget must be >= 1");
  if (spec.sources.empty())
    throw Error(Errc::precondition, "family has no source expressions");

  EnumeratedFamily fam;
  fam.spec = spec;
  Bindings base;
  base.params = spec.params;

  if (spec.kind != FamilyKind::sequence) {
    for (const Expr& s : spec.sources) {
      if (uses_index(s))
        throw Error(Errc::unbound,
                    "index 'n' is only available in sequence families");
      fam.bound_sources.push_back(bind_symbols(s, base));
    }
  }

  auto push = [&](Member m) {
    m.rational = expr_is_rational(m.expr);
    fam.members.push_back(std::move(m));
  };

  switch (spec.kind) {
    case FamilyKind::iterates: {
      const Expr& g = fam.bound_sources[0];
      for (long m = 0; m < budget; ++m) {
        Member mem;
        mem.parent = static_cast<int>(m) - 1;
        mem.apply = 0;
        mem.expr = m == 0 ? g : canonical(e_compose(g, fam.members[m - 1].expr));
        mem.label = "f^" + std::to_string(m + 1);
        mem.duplicate_of = -1;
        push(std::move(mem));
      }
      break;
    }
    case FamilyKind::semigroup: {
      long k = static_cast<long>(fam.bound_sources.size());
      // breadth-first over words; a word's suffix (all but the outermost
      // symbol) is always an earlier member, so values chain incrementally
      long level_begin = -1, level_end = 0;  // empty word sentinel level
      while (static_cast<long>(fam.members.size()) < budget) {
        long next_begin = static_cast<long>(fam.members.size());
        for (long s = 0; s < k && static_cast<long>(fam.members.size()) < budget;
             ++s) {
          for (long p = level_begin;
               p < level_end && static_cast<long>(fam.members.size()) < budget;
               ++p) {
            Member mem;
            mem.parent = static_cast<int>(p);
            mem.apply = static_cast<int>(s);
            std::string sym = "g" + std::to_string(s + 1);
            if (p < 0) {
              mem.expr = fam.bound_sources[s];
              mem.label = sym;
            } else {
              mem.expr = canonical(
                  e_compose(fam.bound_sources[s], fam.members[p].expr));
              mem.label = sym + "∘" + fam.members[p].label;
            }
            mem.duplicate_of = -1;
            push(std::move(mem));
          }
        }
        level_begin = next_begin;
        level_end = static_cast<long>(fam.members.size());
        if (level_begin == level_end) break;  // safety; cannot happen for k>=1
      }
      break;
    }
    case FamilyKind::sequence: {
      for (long m = 0; m < budget; ++m) {
        Bindings b = base;
        b.index = spec.index_start + m;
        Member mem;
        mem.parent = -1;
        mem.apply = -1;
        mem.expr = bind_symbols(spec.sources[0], b);
        mem.label = "n=" + std::to_string(spec.index_start + m);
        mem.duplicate_of = -1;
        push(std::move(mem));
      }
      break;
    }
    case FamilyKind::list: {
      long count = std::min<long>(budget, static_cast<long>(fam.bound_sources.size()));
      for (long m = 0; m < count; ++m) {
        Member mem;
        mem.parent = -1;
        mem.apply = -1;
        mem.expr = fam.bound_sources[m];
        mem.label = "m" + std::to_string(m + 1);
        mem.duplicate_of = -1;
        push(std::move(mem));
      }
      break;
    }
  }

  flag_duplicates(fam);
  return fam;
}

CompositionCheck is_composition_closed(const FamilySpec& spec, long depth,
                                       int samples) {
  if (depth < 1) throw Error(Errc::precondition, "depth must be >= 1");
  EnumeratedFamily fam = enumerate_family(spec, 2 * depth);
  long d = std::min<long>(depth, static_cast<long>(fam.size()));
  int ns = std::min<int>(std::max(samples, 1),
                         static_cast<int>(probe_points().size()));

  std::vector<std::vector<EvalResult>> cols;  // member values per sample point
  for (int s = 0; s < ns; ++s)
    cols.push_back(fam.eval_all(XC(probe_points()[s])));

  CompositionCheck out;
  out.closed = true;
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) {
      // h = f_i o f_j sampled at the probe points
      std::vector<EvalResult> h(ns);
      for (int s = 0; s < ns; ++s) {
        const EvalResult& inner = cols[s][j];
        if (!inner.ok) {
          h[s] = inner;
          continue;
        }
        try {
          h[s].v = eval_at(fam.members[i].expr, inner.v);
          h[s].ok = true;
        } catch (const Error& e) {
          h[s].err = e.code;
        }
      }
      bool found = false;
      for (std::size_t k = 0; k < fam.size() && !found; ++k) {
        bool match = true, any = false;
        for (int s = 0; s < ns && match; ++s) {
          const EvalResult& a = h[s];
          const EvalResult& b = cols[s][k];
          if (a.ok != b.ok) match = false;
          else if (a.ok) {
            any = true;
            if (chordal(a.v, b.v) > 1e-9) match = false;
          }
        }
        found = match && any;
      }
      if (!found) {
        out.closed = false;
        out.witness = std::make_pair(static_cast<int>(i), static_cast<int>(j));
        out.witness_label =
            fam.members[i].label + "∘" + fam.members[j].label;
        return out;
      }
    }
  }
  return out;
}

}  // namespace famdyn
