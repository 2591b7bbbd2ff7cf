#include "eyetask/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace eyetask {

TaskLabel PipelineModel::predict(const Vector& raw) const {
  if (raw.size() != dim())
    throw DataError("predict: expected " + std::to_string(dim()) +
                    " features, got " + std::to_string(raw.size()));
  Vector z = (raw - standardizer.mean).cwiseQuotient(standardizer.stddev);
  if (classifier == "svm") return predict_ovr(*svm, z).first;
  return adaboost->predict(z);
}

namespace {

struct Reader {
  std::ifstream in;
  std::string path;
  int line_no = 0;

  explicit Reader(const std::string& p) : in(p), path(p) {
    if (!in) throw IoError("cannot open model file: " + p);
  }

  std::string line() {
    std::string l;
    if (!std::getline(in, l))
      throw SchemaError(path + ": truncated model file");
    ++line_no;
    return l;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw SchemaError(path + ":" + std::to_string(line_no) + ": " + what);
  }

  // Reads a line of the form "<key> <values...>", checks the key.
  std::istringstream keyed(const std::string& key) {
    std::istringstream iss(line());
    std::string k;
    iss >> k;
    if (k != key) fail("expected '" + key + "', found '" + k + "'");
    return iss;
  }
};

void save_svm(std::ostream& out, const OvrSvmModel& m) {
  out << "machines " << m.machines.size() << '\n';
  for (const auto& bm : m.machines) {
    out << "machine kernel "
        << (bm.kernel.kind == KernelKind::Rbf ? "rbf" : "linear") << " gamma "
        << bm.kernel.gamma << " C " << bm.c << " bias " << bm.bias << " nsv "
        << bm.support_vectors.rows() << " dim " << bm.support_vectors.cols()
        << '\n';
    for (Eigen::Index i = 0; i < bm.support_vectors.rows(); ++i) {
      out << bm.alphas_signed(i);
      for (Eigen::Index j = 0; j < bm.support_vectors.cols(); ++j)
        out << ' ' << bm.support_vectors(i, j);
      out << '\n';
    }
  }
}

OvrSvmModel load_svm(Reader& r, const LabelSet& classes) {
  OvrSvmModel m;
  m.classes = classes;
  size_t n_machines;
  r.keyed("machines") >> n_machines;
  for (size_t k = 0; k < n_machines; ++k) {
    auto iss = r.keyed("machine");
    std::string kw, kind;
    BinarySvmModel bm;
    Eigen::Index nsv, dim;
    iss >> kw >> kind;
    if (kw != "kernel" || (kind != "rbf" && kind != "linear"))
      r.fail("bad kernel spec");
    bm.kernel.kind = (kind == "rbf") ? KernelKind::Rbf : KernelKind::Linear;
    iss >> kw >> bm.kernel.gamma >> kw >> bm.c >> kw >> bm.bias >> kw >> nsv >>
        kw >> dim;
    if (!iss || nsv < 0 || dim <= 0) r.fail("bad machine header");
    bm.support_vectors.resize(nsv, dim);
    bm.alphas_signed.resize(nsv);
    for (Eigen::Index i = 0; i < nsv; ++i) {
      std::istringstream row(r.line());
      row >> bm.alphas_signed(i);
      for (Eigen::Index j = 0; j < dim; ++j) row >> bm.support_vectors(i, j);
      if (!row) r.fail("bad support vector row");
    }
    m.machines.push_back(std::move(bm));
  }
  return m;
}

void save_tree(std::ostream& out, const DecisionTreeModel& t) {
  out << "tree nodes " << t.nodes.size() << " max_depth " << t.max_depth
      << " n_classes " << t.n_classes << '\n';
  for (const auto& nd : t.nodes) {
    if (nd.feature < 0)
      out << "leaf " << nd.leaf << '\n';
    else
      out << "split " << nd.feature << ' ' << nd.threshold << ' ' << nd.left
          << ' ' << nd.right << '\n';
  }
}

DecisionTreeModel load_tree(Reader& r) {
  DecisionTreeModel t;
  size_t n_nodes;
  std::string kw;
  auto iss = r.keyed("tree");
  iss >> kw >> n_nodes >> kw >> t.max_depth >> kw >> t.n_classes;
  if (!iss) r.fail("bad tree header");
  for (size_t i = 0; i < n_nodes; ++i) {
    std::istringstream row(r.line());
    std::string tag;
    row >> tag;
    TreeNode nd;
    if (tag == "leaf") {
      row >> nd.leaf;
    } else if (tag == "split") {
      row >> nd.feature >> nd.threshold >> nd.left >> nd.right;
    } else {
      r.fail("bad tree node tag '" + tag + "'");
    }
    if (!row) r.fail("bad tree node");
    t.nodes.push_back(nd);
  }
  return t;
}

void save_adaboost(std::ostream& out, const AdaBoostModel& m) {
  out << "learners " << m.learners.size() << '\n';
  for (size_t k = 0; k < m.learners.size(); ++k) {
    out << "log_beta " << m.log_betas[k] << '\n';
    save_tree(out, m.learners[k]);
  }
}

AdaBoostModel load_adaboost(Reader& r, const LabelSet& classes) {
  AdaBoostModel m;
  m.classes = classes;
  size_t n;
  r.keyed("learners") >> n;
  for (size_t k = 0; k < n; ++k) {
    double lb;
    r.keyed("log_beta") >> lb;
    m.log_betas.push_back(lb);
    m.learners.push_back(load_tree(r));
  }
  return m;
}

}  // namespace

void save_model(const PipelineModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);

  out << kModelMagic << " v" << kModelVersion << '\n';
  out << "classifier " << m.classifier << '\n';
  out << "classes " << m.classes.size() << '\n';
  for (const auto& c : m.classes.names()) out << c << '\n';
  out << "features " << m.standardizer.feature_names.size() << '\n';
  for (size_t j = 0; j < m.standardizer.feature_names.size(); ++j)
    out << m.standardizer.feature_names[j] << ' ' << m.standardizer.mean(j)
        << ' ' << m.standardizer.stddev(j) << '\n';

  if (m.classifier == "svm")
    save_svm(out, *m.svm);
  else if (m.classifier == "adaboost")
    save_adaboost(out, *m.adaboost);
  else
    throw ConfigError("unknown classifier kind: " + m.classifier);
  if (!out) throw IoError("failed writing model file: " + path);
}

PipelineModel load_model(const std::string& path) {
  Reader r(path);

  {
    std::istringstream iss(r.line());
    std::string magic, version;
    iss >> magic >> version;
    if (magic != kModelMagic)
      r.fail("not a model file (bad magic '" + magic + "')");
    std::string expected = "v" + std::to_string(kModelVersion);
    if (version != expected)
      r.fail("unsupported model version '" + version + "', expected " +
             expected);
  }

  PipelineModel m;
  r.keyed("classifier") >> m.classifier;
  if (m.classifier != "svm" && m.classifier != "adaboost")
    r.fail("unknown classifier kind '" + m.classifier + "'");

  int n_classes;
  r.keyed("classes") >> n_classes;
  if (n_classes < 2) r.fail("model needs at least 2 classes");
  std::vector<std::string> names;
  for (int i = 0; i < n_classes; ++i) names.push_back(r.line());
  m.classes = LabelSet(names);

  int n_features;
  r.keyed("features") >> n_features;
  if (n_features < 1) r.fail("model needs at least 1 feature");
  m.standardizer.mean.resize(n_features);
  m.standardizer.stddev.resize(n_features);
  for (int j = 0; j < n_features; ++j) {
    std::istringstream iss(r.line());
    std::string name;
    iss >> name >> m.standardizer.mean(j) >> m.standardizer.stddev(j);
    if (!iss || m.standardizer.stddev(j) <= 0)
      r.fail("bad standardizer entry");
    m.standardizer.feature_names.push_back(name);
  }

  if (m.classifier == "svm")
    m.svm = load_svm(r, m.classes);
  else
    m.adaboost = load_adaboost(r, m.classes);
  return m;
}

}  // namespace eyetask
