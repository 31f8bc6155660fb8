#include "sams/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "sams/error.hpp"

namespace sams {

namespace {

constexpr const char* kMagic = "SAMS v1";

struct Block {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
};

void writeBlock(std::ostream& out, const std::string& name, std::size_t rows, std::size_t cols,
                std::span<const double> data) {
  out << "block " << name << ' ' << rows << ' ' << cols << '\n';
  std::vector<char> bytes(data.size() * 4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(data[i]));
    for (int k = 0; k < 4; ++k) bytes[i * 4 + k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void writeSlot(std::ostream& out, const ParamSlot& slot) {
  writeBlock(out, slot.name, slot.value.rows(), slot.value.cols(), slot.value.span());
}

Block readBlockData(std::istream& in, const std::string& name, std::size_t rows, std::size_t cols) {
  Block b{rows, cols, std::vector<double>(rows * cols)};
  std::vector<unsigned char> bytes(b.data.size() * 4);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw DataError("FormatError", "block '" + name + "' is truncated");
  }
  for (std::size_t i = 0; i < b.data.size(); ++i) {
    std::uint32_t bits = 0;
    for (int k = 0; k < 4; ++k) bits |= static_cast<std::uint32_t>(bytes[i * 4 + k]) << (8 * k);
    b.data[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return b;
}

const Block& need(const std::map<std::string, Block>& blocks, const std::string& name) {
  auto it = blocks.find(name);
  if (it == blocks.end()) throw DataError("FormatError", "missing block '" + name + "'");
  return it->second;
}

void fill(ParamSlot& slot, const std::map<std::string, Block>& blocks) {
  const Block& b = need(blocks, slot.name);
  if (b.rows * b.cols != slot.value.size() || b.rows != slot.value.rows()) {
    throw DataError("FormatError", "block '" + slot.name + "' has shape " + std::to_string(b.rows) +
                                       "x" + std::to_string(b.cols) + ", expected " +
                                       shapeString(slot.value.shape()));
  }
  slot = ParamSlot(slot.name, Tensor(slot.value.shape(), b.data));
}

}  // namespace

void saveModel(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("IoError", "cannot write " + path);
  const auto& st = model.store;
  out << kMagic << '\n';
  out << "dim " << st.dim() << " senses " << st.senses() << " encoder " << encoderName(model.encoder)
      << " vocab " << model.vocab.size() << '\n';
  for (WordId w = 0; w < model.vocab.size(); ++w) {
    out << model.vocab.token(w) << '\t' << model.vocab.count(w) << '\n';
  }
  Model& m = const_cast<Model&>(model);  // allSlots is non-const; nothing is modified
  for (const ParamSlot* s : m.allSlots()) writeSlot(out, *s);

  std::vector<double> counts(st.centroidCounts.begin(), st.centroidCounts.end());
  writeBlock(out, "centroid.counts", counts.size(), 1, counts);
  const auto& h = model.heads;
  const std::vector<double> l2{h.l2Margin, h.l2Calibration};
  writeBlock(out, "head.l2", 1, 2, l2);
  if (h.c1) {
    std::vector<double> c1 = h.c1->weights;
    c1.push_back(h.c1->bias);
    writeBlock(out, "head.c1", 1, c1.size(), c1);
  }
  const std::vector<double> task{static_cast<double>(h.cost), static_cast<double>(h.mode),
                                 h.pooling ? 1.0 : 0.0, h.trained ? 1.0 : 0.0,
                                 static_cast<double>(model.contextWindow)};
  writeBlock(out, "task.config", 1, task.size(), task);
  out.flush();
  if (!out) throw DataError("IoError", "failed writing " + path);
}

Model loadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("IoError", "cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw DataError("VersionError", path + ": expected header '" + std::string(kMagic) + "'");
  }
  std::size_t d = 0, n = 0, v = 0;
  std::string encoder;
  {
    if (!std::getline(in, line)) throw DataError("FormatError", path + ": missing dimensions line");
    std::istringstream hs(line);
    std::string kd, kn, ke, kv;
    if (!(hs >> kd >> d >> kn >> n >> ke >> encoder >> kv >> v) || kd != "dim" || kn != "senses" ||
        ke != "encoder" || kv != "vocab" || d == 0 || n == 0 || v == 0) {
      throw DataError("FormatError", path + ": malformed dimensions line");
    }
  }
  EncoderKind kind;
  try {
    kind = parseEncoderKind(encoder);
  } catch (const UsageError&) {
    throw DataError("FormatError", path + ": unknown encoder '" + encoder + "'");
  }
  std::vector<std::pair<std::string, std::uint64_t>> rows;
  for (std::size_t i = 0; i < v; ++i) {
    if (!std::getline(in, line)) throw DataError("FormatError", path + ": vocabulary is truncated");
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw DataError("FormatError", path + ": bad vocabulary row");
    try {
      rows.emplace_back(line.substr(0, tab), std::stoull(line.substr(tab + 1)));
    } catch (const std::exception&) {
      throw DataError("FormatError", path + ": bad vocabulary count");
    }
  }

  std::map<std::string, Block> blocks;
  while (std::getline(in, line)) {
    std::istringstream bs(line);
    std::string tag, name;
    std::size_t r = 0, c = 0;
    if (!(bs >> tag >> name >> r >> c) || tag != "block") {
      throw DataError("FormatError", path + ": malformed block header");
    }
    blocks[name] = readBlockData(in, name, r, c);
  }

  Model m;
  m.vocab = Vocabulary::fromRows(std::move(rows));
  m.encoder = kind;
  m.store = SenseStore(v, d, n);
  if (kind == EncoderKind::RecNN) m.comp = CompositionLayer::zeros(d);
  if (kind == EncoderKind::Rnn) m.lstm = LstmCell::zeros(d);
  const std::size_t hidden = need(blocks, "scorer.W1").rows;
  m.scorer = PlausibilityScorer::zeros(d, hidden);
  for (ParamSlot* s : m.allSlots()) fill(*s, blocks);

  const Block& counts = need(blocks, "centroid.counts");
  if (counts.data.size() != v * n) throw DataError("FormatError", "block 'centroid.counts' has the wrong size");
  for (std::size_t i = 0; i < counts.data.size(); ++i) {
    m.store.centroidCounts[i] = static_cast<std::uint64_t>(counts.data[i]);
  }
  const Block& l2 = need(blocks, "head.l2");
  if (l2.data.size() != 2) throw DataError("FormatError", "block 'head.l2' has the wrong size");
  m.heads.l2Margin = l2.data[0];
  m.heads.l2Calibration = l2.data[1];
  if (auto it = blocks.find("head.c1"); it != blocks.end()) {
    const auto& c1 = it->second.data;
    if (c1.empty()) throw DataError("FormatError", "block 'head.c1' is empty");
    m.heads.c1 = LogisticClassifier{std::vector<double>(c1.begin(), c1.end() - 1), c1.back()};
  }
  const Block& task = need(blocks, "task.config");
  if (task.data.size() != 5) throw DataError("FormatError", "block 'task.config' has the wrong size");
  m.heads.cost = static_cast<CostKind>(static_cast<int>(task.data[0]));
  m.heads.mode = static_cast<SenseMode>(static_cast<int>(task.data[1]));
  m.heads.pooling = task.data[2] != 0.0;
  m.heads.trained = task.data[3] != 0.0;
  m.contextWindow = static_cast<std::size_t>(task.data[4]);
  return m;
}

}  // namespace sams
