#include "bgcwm/archive.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bgcwm/error.hpp"

namespace bgcwm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "bgcwm-draws-v1";

void put_f64(std::string& buf, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char raw[8];
  std::memcpy(raw, &bits, 8);
  buf.append(raw, 8);
}

class F64Reader {
 public:
  explicit F64Reader(std::string bytes) : bytes_(std::move(bytes)) {}
  bool done() const { return pos_ == bytes_.size(); }
  double next() {
    if (pos_ + 8 > bytes_.size()) throw Error(ErrorKind::Io, "draws.bin is truncated");
    std::uint64_t bits;
    std::memcpy(&bits, bytes_.data() + pos_, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  arma::uword next_count() {
    const double v = next();
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e12) throw Error(ErrorKind::Io, "draws.bin: corrupt count field");
    return static_cast<arma::uword>(v);
  }

 private:
  std::string bytes_;
  std::size_t pos_ = 0;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void append_component(std::string& buf, const ComponentParams& c) {
  put_f64(buf, c.alpha);
  for (double v : c.beta) put_f64(buf, v);
  put_f64(buf, c.sigma2);
  for (double v : c.tau2) put_f64(buf, v);
  put_f64(buf, c.lambda);
  put_f64(buf, c.delta);
  for (double v : c.mu) put_f64(buf, v);
  const arma::mat rowmajor = c.omega.t();
  for (double v : rowmajor) put_f64(buf, v);
  for (double v : c.phi) put_f64(buf, v);
  put_f64(buf, c.psi);
}

ComponentParams read_component(F64Reader& r, arma::uword p) {
  ComponentParams c;
  c.alpha = r.next();
  c.beta.set_size(p);
  for (auto& v : c.beta) v = r.next();
  c.sigma2 = r.next();
  c.tau2.set_size(p);
  for (auto& v : c.tau2) v = r.next();
  c.lambda = r.next();
  c.delta = r.next();
  c.mu.set_size(p);
  for (auto& v : c.mu) v = r.next();
  arma::mat m(p, p);
  for (auto& v : m) v = r.next();
  c.omega = m.t();
  c.phi.set_size(p * (p - 1) / 2);
  for (auto& v : c.phi) v = r.next();
  c.psi = r.next();
  return c;
}

std::string draws_csv(const DrawArchive& ar) {
  std::string out = "iteration,K,K_plus,gamma,log_lik,log_post,component,pi,n_k,alpha,sigma2,lambda,psi";
  for (arma::uword j = 0; j < ar.p; ++j) out += ",beta" + std::to_string(j + 1);
  for (arma::uword j = 0; j < ar.p; ++j) out += ",mu" + std::to_string(j + 1);
  out += '\n';
  for (const Draw& d : ar.draws) {
    const arma::uvec counts = arma::hist(d.z, arma::regspace<arma::uvec>(0, d.comps.size() - 1));
    for (std::size_t k = 0; k < d.comps.size(); ++k) {
      const auto& c = d.comps[k];
      out += std::to_string(d.info.iteration) + ',' + std::to_string(d.info.K) + ',' +
             std::to_string(d.info.k_plus) + ',' + fmt(d.info.gamma) + ',' + fmt(d.info.log_lik) +
             ',' + fmt(d.info.log_post) + ',' + std::to_string(k + 1) + ',' + fmt(d.pi[k]) + ',' +
             std::to_string(counts[k]) + ',' + fmt(c.alpha) + ',' + fmt(c.sigma2) + ',' +
             fmt(c.lambda) + ',' + fmt(c.psi);
      for (double v : c.beta) out += ',' + fmt(v);
      for (double v : c.mu) out += ',' + fmt(v);
      out += '\n';
    }
  }
  return out;
}

}  // namespace

json draws_layout() {
  return json{
      {"format", kFormat},
      {"encoding", "little-endian IEEE-754 float64, records concatenated"},
      {"record",
       {"iteration", "K", "K_plus", "gamma", "log_lik", "log_post", "pi[K]", "z[n] (1-based labels)",
        "K x component"}},
      {"component",
       {"alpha", "beta[p]", "sigma2", "tau2[p]", "lambda", "delta", "mu[p]", "omega[p*p] row-major",
        "phi[p*(p-1)/2] upper triangle row-major", "psi"}}};
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,K,K_plus,gamma,log_lik,log_post\n";
  for (const TraceRow& r : trace)
    out += std::to_string(r.iteration) + ',' + std::to_string(r.K) + ',' + std::to_string(r.k_plus) +
           ',' + fmt(r.gamma) + ',' + fmt(r.log_lik) + ',' + fmt(r.log_post) + '\n';
  return out;
}

json state_to_json(const MixtureState& state) {
  json comps = json::array();
  for (const auto& c : state.comps) {
    std::vector<std::vector<double>> omega;
    for (arma::uword i = 0; i < c.omega.n_rows; ++i)
      omega.push_back(arma::conv_to<std::vector<double>>::from(c.omega.row(i)));
    comps.push_back({{"alpha", c.alpha},
                     {"beta", arma::conv_to<std::vector<double>>::from(c.beta)},
                     {"sigma2", c.sigma2},
                     {"tau2", arma::conv_to<std::vector<double>>::from(c.tau2)},
                     {"lambda", c.lambda},
                     {"delta", c.delta},
                     {"mu", arma::conv_to<std::vector<double>>::from(c.mu)},
                     {"omega", omega},
                     {"phi", arma::conv_to<std::vector<double>>::from(c.phi)},
                     {"psi", c.psi}});
  }
  std::vector<arma::uword> z(state.z.begin(), state.z.end());
  for (auto& v : z) ++v;
  return json{{"K", state.K()},
              {"gamma", state.gamma},
              {"pi", arma::conv_to<std::vector<double>>::from(state.pi)},
              {"z", z},
              {"components", comps}};
}

void write_archive(const std::string& dir, const DrawArchive& ar, const json& extra_meta) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory '" + dir + "': " + ec.message());

  std::string bin;
  for (const Draw& d : ar.draws) {
    put_f64(bin, static_cast<double>(d.info.iteration));
    put_f64(bin, static_cast<double>(d.info.K));
    put_f64(bin, static_cast<double>(d.info.k_plus));
    put_f64(bin, d.info.gamma);
    put_f64(bin, d.info.log_lik);
    put_f64(bin, d.info.log_post);
    for (double v : d.pi) put_f64(bin, v);
    for (arma::uword v : d.z) put_f64(bin, static_cast<double>(v + 1));
    for (const auto& c : d.comps) append_component(bin, c);
  }
  write_text(root / "draws.bin", bin);
  write_text(root / "trace.csv", trace_csv(ar.trace));
  if (ar.config.write_draws_csv) write_text(root / "draws.csv", draws_csv(ar));

  json manifest{{"kind", "chain"},
                {"chain", ar.chain + 1},
                {"seed", ar.seed},
                {"stream", ar.config.stream_for_chain(ar.chain)},
                {"n", ar.n},
                {"p", ar.p},
                {"config", to_json(ar.config)},
                {"draw_count", ar.draws.size()},
                {"iterations_run", ar.trace.size()},
                {"layout", draws_layout()},
                {"warnings", ar.warnings},
                {"diagnostics",
                 {{"tau_saturations", ar.diag.tau_saturations},
                  {"phi_saturations", ar.diag.phi_saturations},
                  {"gamma_accepts", ar.gamma_accepts},
                  {"k_cap_hits", ar.k_cap_hits}}},
                {"wall_seconds", ar.wall_seconds}};
  for (const auto& item : extra_meta.items()) manifest[item.key()] = item.value();
  write_text(root / "manifest.json", manifest.dump(2) + "\n");
}

DrawArchive read_archive(const std::string& dir) {
  const fs::path root(dir);
  const json m = read_json(root / "manifest.json");
  if (m.value("kind", "") != "chain")
    throw Error(ErrorKind::Io, "'" + dir + "' is not a chain archive directory");
  if (m.at("layout").value("format", "") != kFormat)
    throw Error(ErrorKind::Io, "'" + dir + "': unsupported draws format");

  DrawArchive ar;
  ar.config = config_from_json(m.at("config"));
  ar.chain = m.at("chain").get<std::size_t>() - 1;
  ar.seed = m.at("seed").get<std::uint64_t>();
  ar.n = m.at("n").get<arma::uword>();
  ar.p = m.at("p").get<arma::uword>();
  ar.warnings = m.value("warnings", std::vector<std::string>{});
  ar.wall_seconds = m.value("wall_seconds", 0.0);
  const std::size_t expected = m.at("draw_count").get<std::size_t>();

  F64Reader r(read_text(root / "draws.bin"));
  while (!r.done()) {
    Draw d;
    d.info.iteration = r.next_count();
    d.info.K = r.next_count();
    d.info.k_plus = r.next_count();
    d.info.gamma = r.next();
    d.info.log_lik = r.next();
    d.info.log_post = r.next();
    if (d.info.K == 0 || d.info.k_plus > d.info.K) throw Error(ErrorKind::Io, "draws.bin: corrupt K fields");
    d.pi.set_size(d.info.K);
    for (auto& v : d.pi) v = r.next();
    d.z.set_size(ar.n);
    for (auto& v : d.z) {
      const arma::uword label = r.next_count();
      if (label < 1 || label > d.info.K) throw Error(ErrorKind::Io, "draws.bin: label out of range");
      v = label - 1;
    }
    for (arma::uword k = 0; k < d.info.K; ++k) d.comps.push_back(read_component(r, ar.p));
    ar.draws.push_back(std::move(d));
  }
  if (ar.draws.size() != expected)
    throw Error(ErrorKind::Io, "'" + dir + "': draw count does not match the manifest");

  std::istringstream trace(read_text(root / "trace.csv"));
  std::string line;
  std::getline(trace, line);
  while (std::getline(trace, line)) {
    if (line.empty()) continue;
    TraceRow t;
    unsigned long long it = 0, K = 0, kp = 0;
    if (std::sscanf(line.c_str(), "%llu,%llu,%llu,%lf,%lf,%lf", &it, &K, &kp, &t.gamma, &t.log_lik,
                    &t.log_post) != 6)
      throw Error(ErrorKind::Io, "'" + dir + "/trace.csv': malformed row");
    t.iteration = it;
    t.K = K;
    t.k_plus = kp;
    ar.trace.push_back(t);
  }
  return ar;
}

std::vector<std::string> resolve_chain_dirs(const std::string& path, bool main_only) {
  const fs::path root(path);
  const json m = read_json(root / "manifest.json");
  const std::string kind = m.value("kind", "");
  if (kind == "chain") return {path};
  if (kind != "fit") throw Error(ErrorKind::Io, "'" + path + "' is neither a fit nor a chain directory");
  std::vector<std::string> out;
  for (const auto& c : m.at("chains"))
    if (!main_only || c.value("main_mode", true)) out.push_back((root / c.at("dir").get<std::string>()).string());
  if (out.empty()) throw Error(ErrorKind::Io, "'" + path + "' lists no usable chains");
  return out;
}

}  // namespace bgcwm
