// Python bindings for the simplesmt core.

#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "simplesmt/pipeline.hpp"

namespace py = pybind11;
using namespace simplesmt;

namespace {

Segment seg(const std::vector<std::string>& tokens) { return Segment{tokens}; }

std::vector<Segment> segs(const std::vector<std::vector<std::string>>& rows) {
  std::vector<Segment> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(seg(r));
  return out;
}

// Runs a stage with its log captured and returned.
template <typename F>
std::string logged(F&& f) {
  std::ostringstream log;
  f(log);
  return log.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Phrase-based monolingual translation core";

  // Translators registered later are tried first, so subclasses come last.
  auto data_error = py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<MissingArtifactError>(m, "MissingArtifactError", data_error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("tokenize", [](const std::string& line) { return tokenize(line).tokens; }, py::arg("line"));
  m.def("scrub", [](const std::string& line) { return scrub_simple_side(line); }, py::arg("line"));
  m.def("porter_stem", [](const std::string& w) { return porter_stem(w); }, py::arg("token"));
  m.def("edit_distance", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return token_edit_distance(a, b);
  });

  py::class_<Weights>(m, "Weights")
      .def(py::init<double, double, double>(), py::arg("phrase") = 1.0, py::arg("lm") = 1.0,
           py::arg("reorder") = 1.0)
      .def_readwrite("phrase", &Weights::phrase)
      .def_readwrite("lm", &Weights::lm)
      .def_readwrite("reorder", &Weights::reorder)
      .def("__repr__", [](const Weights& w) { return "Weights(" + w.str() + ")"; });

  py::class_<BleuReport>(m, "BleuReport")
      .def_readonly("score", &BleuReport::score)
      .def_readonly("precisions", &BleuReport::precisions)
      .def_readonly("brevity_penalty", &BleuReport::brevity_penalty);
  m.def(
      "bleu",
      [](const std::vector<std::vector<std::string>>& cands, const std::vector<std::vector<std::string>>& refs) {
        return bleu_corpus(segs(cands), segs(refs));
      },
      py::arg("candidates"), py::arg("references"));

  py::class_<MeteorReport>(m, "MeteorReport")
      .def_readonly("score", &MeteorReport::score)
      .def_readonly("precision", &MeteorReport::precision)
      .def_readonly("recall", &MeteorReport::recall)
      .def_readonly("matches", &MeteorReport::matches)
      .def_readonly("chunks", &MeteorReport::chunks)
      .def_readonly("penalty", &MeteorReport::penalty)
      .def_readonly("alignment", &MeteorReport::alignment);
  m.def(
      "meteor",
      [](const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
        return meteor_sentence(seg(cand), seg(ref));
      },
      py::arg("candidate"), py::arg("reference"));
  m.def(
      "meteor_corpus",
      [](const std::vector<std::vector<std::string>>& cands, const std::vector<std::vector<std::string>>& refs) {
        return meteor_corpus(segs(cands), segs(refs)).pooled;
      },
      py::arg("candidates"), py::arg("references"));

  py::class_<AlignConfig>(m, "AlignConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &AlignConfig::iterations)
      .def_readwrite("variational_bayes", &AlignConfig::variational_bayes)
      .def_readwrite("optimize_tension", &AlignConfig::optimize_tension)
      .def_readwrite("tension", &AlignConfig::tension);
  py::class_<AlignModel>(m, "AlignModel")
      .def_readonly("tension", &AlignModel::tension)
      .def_readonly("log_likelihoods", &AlignModel::log_likelihoods)
      .def("prob", [](const AlignModel& a, const std::string& f, const std::string& e) { return a.table.prob(f, e); });
  m.def(
      "train_alignment",
      [](const std::vector<std::vector<std::string>>& src, const std::vector<std::vector<std::string>>& tgt,
         const AlignConfig& cfg) { return em_train(segs(src), segs(tgt), cfg); },
      py::arg("source"), py::arg("target"), py::arg("config") = AlignConfig{});
  m.def(
      "viterbi_align",
      [](const std::vector<std::string>& src, const std::vector<std::string>& tgt, const AlignModel& model,
         const AlignConfig& cfg) { return viterbi_align(seg(src), seg(tgt), model.table, model.tension, cfg).links; },
      py::arg("source"), py::arg("target"), py::arg("model"), py::arg("config") = AlignConfig{});
  m.def(
      "extract_phrases",
      [](std::size_t n, std::size_t mlen, const std::vector<std::pair<std::size_t, std::size_t>>& links,
         std::size_t max_len) {
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> out;
        for (const auto& s : extract_phrases(n, mlen, AlignmentLinks{links}, max_len))
          out.emplace_back(s.src_begin, s.src_end, s.tgt_begin, s.tgt_end);
        return out;
      },
      py::arg("source_length"), py::arg("target_length"), py::arg("links"), py::arg("max_len") = 7);

  py::class_<PhraseTable>(m, "PhraseTable")
      .def_static(
          "train",
          [](const std::vector<std::vector<std::string>>& src, const std::vector<std::vector<std::string>>& tgt,
             const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& links, std::size_t max_len) {
            std::vector<AlignmentLinks> al;
            for (const auto& l : links) al.push_back(AlignmentLinks{l});
            return PhraseTable::estimate(count_phrases(segs(src), segs(tgt), al, max_len), max_len);
          },
          py::arg("source"), py::arg("target"), py::arg("links"), py::arg("max_len") = 7)
      .def_static("parse", [](const std::string& text) { return PhraseTable::parse(text); })
      .def("serialize", &PhraseTable::serialize)
      .def("entry_count", &PhraseTable::entry_count)
      .def("query", [](const PhraseTable& t, const std::string& src) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& c : t.query(src)) out.emplace_back(c.target, c.log_fwd);
        return out;
      });

  py::class_<NGramModel>(m, "LanguageModel")
      .def_static(
          "train",
          [](const std::vector<std::vector<std::string>>& sents, int order, double discount) {
            LMConfig cfg;
            cfg.order = order;
            cfg.discount = discount;
            return NGramModel::train(segs(sents), cfg);
          },
          py::arg("sentences"), py::arg("order") = 5, py::arg("discount") = 0.75)
      .def_static("from_arpa", [](const std::string& text) { return NGramModel::from_arpa(text); })
      .def("to_arpa", &NGramModel::to_arpa)
      .def("order", &NGramModel::order)
      .def("score", [](const NGramModel& lm, const std::vector<std::string>& toks) { return lm.score_sequence(toks); });

  py::class_<DecodeResult>(m, "DecodeResult")
      .def_property_readonly("translation", [](const DecodeResult& r) { return r.translation.tokens; })
      .def_readonly("score", &DecodeResult::score)
      .def_property_readonly("features", [](const DecodeResult& r) {
        return std::make_tuple(r.features.phrase, r.features.lm, r.features.reorder);
      });
  m.def(
      "decode",
      [](const std::vector<std::string>& src, const PhraseTable& table, const NGramModel& lm, const Weights& w,
         std::size_t beam_size, int distortion_limit) {
        DecoderConfig cfg;
        cfg.beam_size = beam_size;
        cfg.distortion_limit = distortion_limit;
        return decode(seg(src), table, lm, w, cfg);
      },
      py::arg("source"), py::arg("table"), py::arg("lm"), py::arg("weights") = Weights{},
      py::arg("beam_size") = 100, py::arg("distortion_limit") = 6);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_static("parse", [](const std::string& text) { return PipelineConfig::parse(text); })
      .def_static("load", &PipelineConfig::load)
      .def_static("from_manifest", &PipelineConfig::from_manifest)
      .def_static("keys", &PipelineConfig::keys)
      .def("set", &PipelineConfig::set)
      .def("validate", &PipelineConfig::validate)
      .def("serialize", &PipelineConfig::serialize)
      .def("entries", [](const PipelineConfig& c) {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : c.entries()) out[k] = v;
        return out;
      });
  m.def("reverse_direction", &reverse_direction);

  // Stages return their log text.
  m.def("prepare", [](const PipelineConfig& c) { return logged([&](std::ostream& l) { run_prepare(c, l); }); });
  m.def("align", [](const PipelineConfig& c) { return logged([&](std::ostream& l) { run_align(c, l); }); });
  m.def("phrases", [](const PipelineConfig& c) { return logged([&](std::ostream& l) { run_phrases(c, l); }); });
  m.def("lm", [](const PipelineConfig& c) { return logged([&](std::ostream& l) { run_lm(c, l); }); });
  m.def(
      "decode_split",
      [](const PipelineConfig& c, const std::string& part) {
        return logged([&](std::ostream& l) { run_decode(c, part, l); });
      },
      py::arg("config"), py::arg("split") = "test");
  m.def(
      "eval_split",
      [](const PipelineConfig& c, const std::string& part) {
        return logged([&](std::ostream& l) { run_eval(c, part, l); });
      },
      py::arg("config"), py::arg("split") = "test");
  m.def("sweep", [](const PipelineConfig& c) { return logged([&](std::ostream& l) { run_sweep_stage(c, l); }); });
  m.def("report", [](const PipelineConfig& c) { return logged([&](std::ostream& l) { run_report(c, l); }); });
}
