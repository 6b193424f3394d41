// Generates the bundled synthetic patent corpus: three planted topics with
// exclusive vocabularies plus a handful of keyword-free noise documents that
// the phrase filter should drop. Deterministic for a given seed, so the
// committed fixture can be reproduced bit-for-bit.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fvsm/stemmer.hpp"
#include "fvsm/util.hpp"

namespace {

const std::vector<std::vector<std::string>> kTopicVocab = {
    {"router", "packet", "network", "bandwidth", "protocol", "gateway", "antenna",
     "spectrum", "wireless", "modem", "ethernet", "routing", "transmission", "uplink",
     "downlink", "carrier", "roaming", "handover", "latency", "channel"},
    {"sensor", "sensing", "temperature", "humidity", "accelerometer", "gyroscope",
     "measurement", "calibration", "detector", "infrared", "proximity", "pressure",
     "telemetry", "sampling", "battery", "actuator", "rfid", "tag", "reader", "wearable"},
    {"cloud", "computing", "server", "storage", "database", "virtualization", "container",
     "analytics", "processing", "scheduler", "platform", "provisioning", "workload",
     "datacenter", "replication", "encryption", "authentication", "firmware", "middleware",
     "orchestration"},
};

// Each document's title carries its topic's signature bigram so the phrase
// filter keeps every topical document.
const std::vector<std::vector<std::string>> kSignatureBigrams = {
    {"wireless", "network"},
    {"wearable", "device"},
    {"cloud", "computing"},
};

const std::vector<std::string> kFiller = {
    "device", "system", "method", "apparatus", "module", "unit", "data", "signal",
    "value", "interface", "component", "embodiment", "configuration", "operation",
    "plurality"};

const std::vector<std::string> kStops = {"the", "and", "for", "with", "from"};

std::string pick(const std::vector<std::string>& words, fvsm::Rng& rng) {
  return words[rng.below(words.size())];
}

std::string sentence_case(std::string text) {
  if (!text.empty() && text[0] >= 'a' && text[0] <= 'z')
    text[0] = static_cast<char>(text[0] - 'a' + 'A');
  return text;
}

// ~40 words grouped into sentences, mixing topic vocabulary with filler and
// stopwords in the given proportions.
std::string make_abstract(int topic, int secondary_topic, double own_share,
                          double secondary_share, fvsm::Rng& rng) {
  const int total = 30 + static_cast<int>(rng.below(21));
  std::string out;
  std::string sentence;
  int words_in_sentence = 0;
  for (int w = 0; w < total; ++w) {
    const double roll = rng.uniform();
    std::string word;
    if (roll < own_share) word = pick(kTopicVocab[topic], rng);
    else if (roll < own_share + secondary_share) word = pick(kTopicVocab[secondary_topic], rng);
    else if (roll < 0.9) word = pick(kFiller, rng);
    else word = pick(kStops, rng);

    if (!sentence.empty()) sentence += ' ';
    sentence += word;
    if (++words_in_sentence >= 8 + static_cast<int>(rng.below(4))) {
      out += sentence_case(sentence) + ". ";
      sentence.clear();
      words_in_sentence = 0;
    }
  }
  if (!sentence.empty()) out += sentence_case(sentence) + ".";
  return out;
}

std::string make_title(int topic, fvsm::Rng& rng) {
  std::string title = "A method for " + kSignatureBigrams[topic][0] + " " +
                      kSignatureBigrams[topic][1] + " " + pick(kTopicVocab[topic], rng) + " " +
                      pick(kFiller, rng);
  return sentence_case(title);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled synthetic patent fixture"};
  std::string out_dir = "data/fixture";
  std::uint64_t seed = 42;
  int docs_per_topic = 70;
  int noise_docs = 6;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--docs-per-topic", docs_per_topic, "Documents per planted topic");
  app.add_option("--noise-docs", noise_docs, "Keyword-free documents (dropped by the filter)");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  fvsm::Rng rng(seed);

  const int num_topics = static_cast<int>(kTopicVocab.size());
  const int mixed_per_topic = docs_per_topic / 7;  // harder documents per topic

  std::string corpus;
  std::vector<std::vector<std::string>> pure_ids(num_topics);
  // mixed_ids[t] holds documents of some other topic whose secondary vocabulary is t.
  std::vector<std::vector<std::string>> mixed_with_secondary(num_topics);

  int doc_number = 0;
  auto next_id = [&doc_number]() {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%04d", ++doc_number);
    return std::string(buf);
  };

  for (int topic = 0; topic < num_topics; ++topic) {
    for (int d = 0; d < docs_per_topic; ++d) {
      const bool mixed = d < mixed_per_topic;
      const int secondary = mixed ? (topic + 1 + static_cast<int>(rng.below(num_topics - 1))) %
                                        num_topics
                                  : topic;
      nlohmann::json record;
      const std::string id = next_id();
      record["id"] = id;
      record["title"] = make_title(topic, rng);
      record["abstract"] = mixed ? make_abstract(topic, secondary, 0.45, 0.30, rng)
                                 : make_abstract(topic, topic, 0.70, 0.0, rng);
      record["label"] = topic;
      corpus += record.dump() + "\n";
      if (mixed) mixed_with_secondary[secondary].push_back(id);
      else pure_ids[topic].push_back(id);
    }
  }
  for (int d = 0; d < noise_docs; ++d) {
    nlohmann::json record;
    record["id"] = next_id();
    record["title"] = "General remarks about systems";
    record["abstract"] = make_abstract(0, 0, 0.0, 0.0, rng);  // filler and stopwords only
    corpus += record.dump() + "\n";
  }
  fvsm::write_file(out_dir + "/corpus.jsonl", corpus);

  // Phrase file: comma-separated stems, quoted the way keyword tables are
  // usually published.
  std::string phrases;
  for (const auto& bigram : kSignatureBigrams)
    phrases += "'" + fvsm::porter_stem(bigram[0]) + "','" + fvsm::porter_stem(bigram[1]) + "'\n";
  for (const auto& vocab : kTopicVocab)
    for (std::size_t i = 0; i < 6; ++i) phrases += "'" + fvsm::porter_stem(vocab[i]) + "'\n";
  phrases += "'rfid','tag'\n";
  fvsm::write_file(out_dir + "/phrases.txt", phrases);

  // Triads: S1 uses an easy negative from a different topic; S2 uses a mixed
  // document that borrows the base topic's vocabulary.
  std::string triads = "base_id,positive_id,negative_id,set_tag\n";
  auto pick_two = [&rng](const std::vector<std::string>& ids, std::string& a, std::string& b) {
    const std::size_t i = rng.below(ids.size());
    std::size_t j = rng.below(ids.size() - 1);
    if (j >= i) ++j;
    a = ids[i];
    b = ids[j];
  };
  for (int t = 0; t < 20; ++t) {
    const int topic = t % num_topics;
    std::string base, positive;
    pick_two(pure_ids[topic], base, positive);
    const auto& other = pure_ids[(topic + 1) % num_topics];
    triads += base + "," + positive + "," + other[rng.below(other.size())] + ",S1\n";
  }
  for (int t = 0; t < 10; ++t) {
    const int topic = t % num_topics;
    std::string base, positive;
    pick_two(pure_ids[topic], base, positive);
    const auto& hard = mixed_with_secondary[topic];
    if (hard.empty()) continue;
    triads += base + "," + positive + "," + hard[rng.below(hard.size())] + ",S2\n";
  }
  fvsm::write_file(out_dir + "/triads.csv", triads);

  std::printf("fixture: %d documents (%d topical + %d noise), phrases and triads written to %s\n",
              doc_number, num_topics * docs_per_topic, noise_docs, out_dir.c_str());
  return 0;
}
