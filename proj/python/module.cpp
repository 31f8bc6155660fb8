#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sams/checkpoint.hpp"
#include "sams/eval.hpp"
#include "sams/gradcheck.hpp"
#include "sams/objective.hpp"
#include "sams/siamese.hpp"

namespace py = pybind11;
using namespace sams;

namespace {

std::vector<double> toList(const Tensor& t) { return t.data(); }

WordId knownWord(const Model& m, const std::string& word) {
  if (!m.vocab.contains(word)) throw DataError("UnknownWord", "'" + word + "' is not in the vocabulary");
  return m.vocab.id(word);
}

py::dict reportDict(const std::vector<EvalReport>& reports) {
  py::dict out;
  for (const auto& r : reports) out[py::str(r.metric)] = r.value;
  return out;
}

Model trainGenericPy(const std::string& corpus, const std::optional<std::string>& trees,
                     const std::string& encoder, std::size_t dim, std::size_t senses,
                     std::size_t hidden, double margin, std::size_t kSub, std::size_t kShuf,
                     std::size_t epochs, std::size_t batch, std::uint64_t seed,
                     std::size_t minCount, std::size_t contextWindow, std::size_t threads) {
  GenericTrainConfig cfg;
  cfg.model.encoder = parseEncoderKind(encoder);
  cfg.model.dim = dim;
  cfg.model.senses = senses;
  cfg.model.hidden = hidden;
  cfg.hinge.margin = margin;
  cfg.hinge.kSub = kSub;
  cfg.hinge.kShuf = kShuf;
  cfg.epochs = epochs;
  cfg.batchSize = batch;
  cfg.seed = seed;
  cfg.minCount = minCount;
  cfg.contextWindow = contextWindow;
  cfg.threads = threads;
  py::gil_scoped_release release;
  return trainGeneric(corpus, trees, cfg);
}

Model trainParaphrasePy(const std::string& pairsPath, const std::optional<Model>& init,
                        const std::optional<std::string>& trees1,
                        const std::optional<std::string>& trees2, const std::string& cost,
                        const std::string& mode, bool pooling, bool ensemble, std::size_t epochs,
                        std::size_t batch, std::uint64_t seed, double validation,
                        std::vector<double> margins, bool freezeEmbeddings,
                        const std::string& encoder, std::size_t dim, std::size_t senses,
                        std::size_t hidden, std::size_t threads) {
  ParaphraseTrainConfig cfg;
  cfg.cost = parseCostKind(cost);
  cfg.mode = parseSenseMode(mode);
  cfg.pooling = pooling;
  cfg.trainC1 = ensemble;
  cfg.epochs = epochs;
  cfg.batchSize = batch;
  cfg.seed = seed;
  cfg.validationFraction = validation;
  cfg.margins = std::move(margins);
  cfg.updateEmbeddings = !freezeEmbeddings;
  cfg.threads = threads;
  auto pairs = readPairs(pairsPath, trees1, trees2);
  Model start;
  if (init) {
    start = *init;
  } else {
    ModelConfig mc;
    mc.encoder = parseEncoderKind(encoder);
    mc.dim = dim;
    mc.senses = senses;
    mc.hidden = hidden;
    start = Model::initialize(vocabFromPairs(pairs, 1), mc, seed);
  }
  py::gil_scoped_release release;
  return trainParaphrase(std::move(start), pairs, cfg).model;
}

}  // namespace

PYBIND11_MODULE(_sams, m) {
  m.doc() = "Multi-sense compositional sentence models";

  static py::exception<UsageError> usageError(m, "UsageError", PyExc_ValueError);
  static py::exception<DataError> dataError(m, "DataError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UsageError& e) {
      py::set_error(usageError, e.what());
    } catch (const DataError& e) {
      py::set_error(dataError, e.what());
    }
  });

  py::class_<Model>(m, "Model")
      .def_static("load", &loadModel, py::arg("path"))
      .def("save", [](const Model& self, const std::string& path) { saveModel(self, path); },
           py::arg("path"))
      .def_property_readonly("dim", &Model::dim)
      .def_property_readonly("senses", &Model::senses)
      .def_property_readonly("encoder", [](const Model& self) { return encoderName(self.encoder); })
      .def_property_readonly("vocab_size", [](const Model& self) { return self.vocab.size(); })
      .def_property_readonly("beta", [](const Model& self) { return self.store.betaValue(); })
      .def("tokens",
           [](const Model& self) {
             std::vector<std::string> out;
             for (WordId w = 0; w < self.vocab.size(); ++w) out.push_back(self.vocab.token(w));
             return out;
           })
      .def("main_vector",
           [](const Model& self, const std::string& word) {
             return toList(self.store.mainVector(knownWord(self, word)));
           },
           py::arg("word"))
      .def("sense_vector",
           [](const Model& self, const std::string& word, std::size_t sense) {
             if (sense >= self.senses()) throw UsageError("ConfigError", "sense index out of range");
             return toList(self.store.senseVector(knownWord(self, word), sense));
           },
           py::arg("word"), py::arg("sense"))
      .def("encode",
           [](Model& self, const std::string& sentence, const std::string& mode, bool pooling) {
             Sentence s = encodeSentence(self.vocab, splitTokens(sentence));
             return toList(encodeSentence(self, s, nullptr, parseSenseMode(mode), pooling));
           },
           py::arg("sentence"), py::arg("mode") = "ambiguous", py::arg("pooling") = false)
      .def("__repr__", [](const Model& self) {
        return "<sams.Model dim=" + std::to_string(self.dim()) + " senses=" +
               std::to_string(self.senses()) + " encoder=" + encoderName(self.encoder) +
               " vocab=" + std::to_string(self.vocab.size()) + ">";
      });

  m.def("train_generic", &trainGenericPy, py::arg("corpus"), py::arg("trees") = py::none(),
        py::arg("encoder") = "recnn", py::arg("dim") = 300, py::arg("senses") = 3,
        py::arg("hidden") = 150, py::arg("margin") = 1.0, py::arg("k_sub") = 5,
        py::arg("k_shuf") = 1, py::arg("epochs") = 5, py::arg("batch") = 16, py::arg("seed") = 1,
        py::arg("min_count") = 1, py::arg("context_window") = 0, py::arg("threads") = 1);

  m.def("train_paraphrase", &trainParaphrasePy, py::arg("pairs"), py::arg("init") = py::none(),
        py::arg("trees1") = py::none(), py::arg("trees2") = py::none(),
        py::arg("cost") = "cosine", py::arg("mode") = "soft", py::arg("pooling") = false,
        py::arg("ensemble") = false, py::arg("epochs") = 10, py::arg("batch") = 16,
        py::arg("seed") = 1, py::arg("validation") = 0.1,
        py::arg("margins") = std::vector<double>{1.0}, py::arg("freeze_embeddings") = false,
        py::arg("encoder") = "recnn", py::arg("dim") = 300, py::arg("senses") = 3,
        py::arg("hidden") = 150, py::arg("threads") = 1);

  m.def("evaluate_similarity",
        [](const Model& model, const std::string& path, const std::vector<std::string>& metrics,
           std::size_t window) {
          return reportDict(evaluateSimilarity(model, readSimilarityItems(path), metrics, window));
        },
        py::arg("model"), py::arg("path"),
        py::arg("metrics") = std::vector<std::string>{"global", "local", "avg"},
        py::arg("window") = 5);

  m.def("evaluate_paraphrase",
        [](Model& model, const std::string& path, const std::optional<std::string>& trees1,
           const std::optional<std::string>& trees2, bool ensemble) {
          return reportDict(evaluateParaphrase(model, readPairs(path, trees1, trees2), ensemble));
        },
        py::arg("model"), py::arg("path"), py::arg("trees1") = py::none(),
        py::arg("trees2") = py::none(), py::arg("ensemble") = false);

  m.def("predict",
        [](Model& model, const std::string& s1, const std::string& s2, bool ensemble) {
          ParaphrasePair pair{splitTokens(s1), splitTokens(s2), std::nullopt, std::nullopt, 0};
          Prediction p = predictParaphrase(model, pair, ensemble);
          return py::make_tuple(p.probability, p.label);
        },
        py::arg("model"), py::arg("s1"), py::arg("s2"), py::arg("ensemble") = false);

  m.def("global_sim", &globalSim, py::arg("w1"), py::arg("w2"), py::arg("model"));

  m.def("neighbors",
        [](const Model& model, const std::string& word, std::size_t k, const std::string& space,
           std::size_t sense) {
          std::vector<std::tuple<std::string, std::size_t, double>> out;
          for (const auto& n : nearestNeighbors(model, word, k, parseVectorSpace(space), sense)) {
            out.emplace_back(model.vocab.token(n.word), n.sense, n.score);
          }
          return out;
        },
        py::arg("model"), py::arg("word"), py::arg("k") = 10, py::arg("space") = "main",
        py::arg("sense") = 0);

  m.def("spearman",
        [](const std::vector<double>& xs, const std::vector<double>& ys) { return spearman(xs, ys); },
        py::arg("xs"), py::arg("ys"));

  m.def("accuracy_f1",
        [](const std::vector<int>& preds, const std::vector<int>& gold) {
          AccuracyF1 r = accuracyF1(preds, gold);
          return py::make_tuple(r.accuracy, r.f1);
        },
        py::arg("preds"), py::arg("gold"));

  m.def("grad_check",
        [](std::size_t dim, std::size_t hidden, std::uint64_t seed) {
          py::dict out;
          for (const auto& c : runGradCheck(dim, hidden, seed).cases) out[py::str(c.name)] = c.maxRelError;
          return out;
        },
        py::arg("dim") = 8, py::arg("hidden") = 6, py::arg("seed") = 1);
}
