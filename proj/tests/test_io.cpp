#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "core/ops.hpp"
#include "io/binary.hpp"
#include "io/checkpoint.hpp"
#include "io/corpus.hpp"
#include "io/table.hpp"
#include "signal/synthetic.hpp"

using namespace eegdiff;

namespace {

std::filesystem::path tmp_dir() {
    auto p = std::filesystem::temp_directory_path() / "eegdiff_io_test";
    std::filesystem::create_directories(p);
    return p;
}

std::vector<EegRecording> tiny_recordings() {
    Rng rng(9);
    std::vector<EegRecording> recs;
    for (int i = 0; i < 3; ++i) {
        EegRecording r;
        r.samples = Tensor::randn({2 + i, 8}, rng);
        r.sample_rate_hz = 250.0;
        r.subject_id = static_cast<uint32_t>(i);
        r.label = i == 0 ? -1 : i;
        recs.push_back(std::move(r));
    }
    return recs;
}

} // namespace

TEST_CASE("recording corpus roundtrip is bit-exact") {
    auto recs = tiny_recordings();
    auto path = (tmp_dir() / "plain.eegc").string();
    save_recordings(path, recs);
    auto loaded = load_recordings(path);
    REQUIRE(loaded.size() == recs.size());
    // byte-level: re-encoding the loaded corpus reproduces the file
    CHECK(encode_recordings(loaded) == encode_recordings(recs));
    CHECK(loaded[1].subject_id == 1);
    CHECK(loaded[0].label == -1);
}

TEST_CASE("truncated corpus names the missing byte range") {
    auto recs = tiny_recordings();
    auto bytes = encode_recordings(recs);
    bytes.resize(bytes.size() - 7);
    try {
        decode_recordings(bytes);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("needed bytes") != std::string::npos);
    }
}

TEST_CASE("wrong magic yields a distinct not-a-corpus error") {
    auto bytes = encode_recordings(tiny_recordings());
    bytes[0] = 'X';
    try {
        decode_recordings(bytes);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("not a corpus file") != std::string::npos);
    }
}

TEST_CASE("corpus version mismatch is rejected") {
    auto bytes = encode_recordings(tiny_recordings());
    bytes[4] = 9;
    CHECK_THROWS_AS(decode_recordings(bytes), FormatError);
}

TEST_CASE("non-finite corpus samples are rejected") {
    auto recs = tiny_recordings();
    auto bytes = encode_recordings(recs);
    // first record payload starts after header(10) + subject(4)+label(4)+fs(4)+C(4)+L(4)
    const size_t payload = 10 + 20;
    for (size_t i = 0; i < 4; ++i) bytes[payload + i] = 0xff; // f32 NaN bit pattern
    CHECK_THROWS_AS(decode_recordings(bytes), FormatError);
}

TEST_CASE("paired corpus roundtrips and rejects kind confusion") {
    CorpusSpec spec;
    spec.classes = 3;
    spec.subjects = 2;
    spec.pretrain_recordings = 2;
    spec.train_pairs = 5;
    spec.test_pairs = 2;
    spec.image_size = 8;
    spec.min_channels = 2;
    spec.max_channels = 3;
    spec.raw_length = 128;
    SyntheticCorpus corpus = generate_synthetic_corpus(spec, 4);
    auto path = (tmp_dir() / "pairs.eegc").string();
    save_paired(path, corpus.train);
    PairedDataset loaded = load_paired(path);
    CHECK(encode_paired(loaded) == encode_paired(corpus.train));
    CHECK(loaded.class_count == 3);
    for (const auto& s : loaded.samples) CHECK(s.recording.label == s.class_index);

    // loading a paired file as a plain corpus (or vice versa) fails loudly
    CHECK_THROWS_AS(load_recordings(path), Error);
    auto plain_path = (tmp_dir() / "plain2.eegc").string();
    save_recordings(plain_path, corpus.pretrain);
    CHECK_THROWS_AS(load_paired(plain_path), Error);
}

TEST_CASE("checkpoint roundtrip is bit-exact for random models") {
    Rng rng(41);
    ParamSet params;
    params.add("enc.w", Tensor::randn({4, 7}, rng), true);
    params.add("enc.b", Tensor::randn({4}, rng), true);
    params.add("frozen.k", Tensor::randn({2, 3, 3, 3}, rng), false);
    Checkpoint ckpt = make_checkpoint(params, "unit", 123, nlohmann::json{{"run.seed", 123}});
    auto bytes = encode_checkpoint(ckpt);
    Checkpoint back = decode_checkpoint(bytes);
    CHECK(encode_checkpoint(back) == bytes);
    CHECK(back.meta.at("stage") == "unit");
    CHECK(back.meta.at("seed") == 123);
    REQUIRE(back.tensors.size() == 3);
    CHECK(back.find("enc.w") != nullptr);
    CHECK(back.find("frozen.k")->trainable == false);

    // load into a fresh registry preserves values and flags
    ParamSet fresh;
    Rng rng2(99);
    fresh.add("enc.w", Tensor::randn({4, 7}, rng2), true);
    fresh.add("enc.b", Tensor::randn({4}, rng2), true);
    fresh.add("frozen.k", Tensor::randn({2, 3, 3, 3}, rng2), true);
    load_into(back, fresh);
    CHECK(fresh.at("frozen.k").trainable == false);
    CHECK(fresh.at("enc.w").tensor.data() == params.at("enc.w").tensor.data());

    // shape mismatch on load
    ParamSet wrong;
    wrong.add("enc.w", Tensor::zeros({4, 8}), true);
    wrong.add("enc.b", Tensor::zeros({4}), true);
    wrong.add("frozen.k", Tensor::zeros({2, 3, 3, 3}), true);
    CHECK_THROWS_AS(load_into(back, wrong), ShapeError);
}

TEST_CASE("every single-byte corruption of a checkpoint is detected") {
    Rng rng(53);
    ParamSet params;
    params.add("a.weight", Tensor::randn({3, 5}, rng), true);
    params.add("b.bias", Tensor::randn({6}, rng), false);
    Checkpoint ckpt = make_checkpoint(params, "fuzz", 7, nlohmann::json::object());
    const auto bytes = encode_checkpoint(ckpt);

    Rng fuzz(777);
    int detected = 0;
    const int trials = 300;
    for (int i = 0; i < trials; ++i) {
        auto corrupted = bytes;
        const size_t pos = static_cast<size_t>(fuzz.uniform_int(static_cast<int64_t>(bytes.size())));
        const uint8_t bit = static_cast<uint8_t>(1u << fuzz.uniform_int(8));
        corrupted[pos] ^= bit;
        bool caught = false;
        try {
            decode_checkpoint(corrupted); // success here is silent acceptance
        } catch (const Error&) {
            caught = true;
        } catch (const std::exception&) {
            caught = true;
        }
        if (caught) ++detected;
    }
    CHECK(detected == trials);
}

TEST_CASE("flipping one payload byte names the corrupted tensor") {
    Rng rng(67);
    ParamSet params;
    params.add("layer.kernel", Tensor::randn({2, 2}, rng), true);
    Checkpoint ckpt = make_checkpoint(params, "fuzz", 7, nlohmann::json::object());
    auto bytes = encode_checkpoint(ckpt);
    // flip a byte near the end of the payload (inside the tensor record)
    bytes[bytes.size() - 6] ^= 0x10;
    try {
        decode_checkpoint(bytes);
        FAIL("expected a corruption error");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("layer.kernel") != std::string::npos);
    }
}

TEST_CASE("ppm roundtrip preserves quantized pixels") {
    Rng rng(71);
    Tensor img = Tensor::uniform({3, 9, 7}, rng, 0.0, 1.0);
    auto path = (tmp_dir() / "img.ppm").string();
    write_ppm(path, img);
    Tensor back = read_ppm(path);
    REQUIRE(back.shape() == img.shape());
    for (int64_t i = 0; i < img.numel(); ++i) {
        CHECK(std::abs(back.data()[static_cast<size_t>(i)] - img.data()[static_cast<size_t>(i)]) <= 0.5 / 255.0 + 1e-9);
    }
}

TEST_CASE("csv writer emits deterministic rows") {
    auto path = (tmp_dir() / "log.csv").string();
    {
        CsvWriter csv(path, "epoch,step,loss");
        csv.row({"1", "2", CsvWriter::num(0.123456789)});
        CHECK_THROWS_AS(csv.row({"1", "2"}), Error);
    }
    auto bytes = read_file(path);
    const std::string text(bytes.begin(), bytes.end());
    CHECK(text == "epoch,step,loss\n1,2,0.123456789\n");
}
