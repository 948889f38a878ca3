#include "bridgesim/tss.hpp"
#include "doctest.h"

using namespace bridgesim;

namespace {

Seed32 testSeed(std::uint8_t fill) {
  Seed32 s{};
  s.fill(fill);
  return s;
}

SignHashes oneHash(std::uint8_t tag) { return {sha256(Bytes{tag})}; }

}  // namespace

TEST_CASE("signature released only after every listed signer approves") {
  TssEngine eng("grp", testSeed(1), 2);
  SignHashes msg = oneHash(1);
  REQUIRE(eng.startSigning("s1", {0, 1, 2}, msg, 100, 0).ok());

  REQUIRE(eng.approve("s1", 0, msg, 1).ok());
  REQUIRE(eng.approve("s1", 1, msg, 2).ok());
  auto partial = eng.sessionResult("s1", 50);
  REQUIRE(partial.ok());
  CHECK(partial->state == TssEngine::SignState::pending);  // 2 of 3 approved

  REQUIRE(eng.approve("s1", 2, msg, 5).ok());
  auto sameTick = eng.sessionResult("s1", 5);
  REQUIRE(sameTick.ok());
  CHECK(sameTick->state == TssEngine::SignState::pending);  // ready only at c+1

  auto done = eng.sessionResult("s1", 6);
  REQUIRE(done.ok());
  CHECK(done->state == TssEngine::SignState::ready);
  CHECK(TssEngine::verify(eng.groupKey(), msg, done->signature));
  CHECK_FALSE(TssEngine::verify(eng.groupKey(), oneHash(2), done->signature));
}

TEST_CASE("start rejects duplicates, thin signer sets, and empty messages") {
  TssEngine eng("grp", testSeed(2), 3);
  SignHashes msg = oneHash(1);

  auto thin = eng.startSigning("a", {0, 1}, msg, 10, 0);
  REQUIRE_FALSE(thin.ok());
  CHECK(thin.error() == Err::TooFewSigners);

  // Duplicated indices collapse before the threshold check.
  auto padded = eng.startSigning("a", {0, 1, 1, 1}, msg, 10, 0);
  REQUIRE_FALSE(padded.ok());
  CHECK(padded.error() == Err::TooFewSigners);

  auto empty = eng.startSigning("a", {0, 1, 2}, {}, 10, 0);
  REQUIRE_FALSE(empty.ok());
  CHECK(empty.error() == Err::MalformedTx);

  REQUIRE(eng.startSigning("a", {0, 1, 2}, msg, 10, 0).ok());
  auto dup = eng.startSigning("a", {0, 1, 2}, msg, 10, 0);
  REQUIRE_FALSE(dup.ok());
  CHECK(dup.error() == Err::DuplicateSession);
}

TEST_CASE("approve rejects strangers, non-signers, and late arrivals") {
  TssEngine eng("grp", testSeed(3), 2);
  SignHashes msg = oneHash(1);
  REQUIRE(eng.startSigning("s", {1, 3}, msg, 10, 0).ok());

  CHECK(eng.approve("nope", 1, msg, 1).error() == Err::UnknownSession);
  CHECK(eng.approve("s", 2, msg, 1).error() == Err::NotASigner);
  CHECK(eng.approve("s", 1, msg, 11).error() == Err::SessionClosed);

  // The late approval kept signer 1 out, so the deadline passes unfulfilled.
  REQUIRE(eng.approve("s", 3, msg, 4).ok());
  auto res = eng.sessionResult("s", 11);
  REQUIRE(res.ok());
  CHECK(res->state == TssEngine::SignState::failed);
  CHECK(res->signature.empty());
}

TEST_CASE("a mismatched approval poisons the whole session") {
  TssEngine eng("grp", testSeed(4), 2);
  SignHashes msg = oneHash(1);
  REQUIRE(eng.startSigning("s", {0, 1}, msg, 10, 0).ok());
  REQUIRE(eng.approve("s", 0, msg, 1).ok());

  auto bad = eng.approve("s", 1, oneHash(9), 2);
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.error() == Err::MessageMismatch);

  // Even the correct message is refused afterwards; the session runs out.
  auto retry = eng.approve("s", 1, msg, 3);
  REQUIRE_FALSE(retry.ok());
  CHECK(retry.error() == Err::SessionClosed);
  CHECK(eng.sessionResult("s", 11)->state == TssEngine::SignState::failed);
}

TEST_CASE("step emits each outcome exactly once at its visibility tick") {
  TssEngine eng("grp", testSeed(5), 2);
  SignHashes msg = oneHash(1);
  REQUIRE(eng.startSigning("good", {0, 1}, msg, 10, 0).ok());
  REQUIRE(eng.startSigning("stuck", {0, 1}, msg, 10, 0).ok());
  REQUIRE(eng.approve("good", 0, msg, 2).ok());
  REQUIRE(eng.approve("good", 1, msg, 3).ok());
  REQUIRE(eng.approve("stuck", 0, msg, 3).ok());

  CHECK(eng.step(3).empty());  // completion at 3 is not visible yet

  auto at4 = eng.step(4);
  REQUIRE(at4.size() == 1);
  CHECK(at4[0].sessionId == "good");
  CHECK(at4[0].state == TssEngine::SignState::ready);
  CHECK(at4[0].signers == std::vector<int>{0, 1});
  CHECK(TssEngine::verify(eng.groupKey(), msg, at4[0].signature));

  CHECK(eng.step(10).empty());  // deadline tick itself emits nothing

  auto at11 = eng.step(11);
  REQUIRE(at11.size() == 1);
  CHECK(at11[0].sessionId == "stuck");
  CHECK(at11[0].state == TssEngine::SignState::failed);
  CHECK(at11[0].signature.empty());

  CHECK(eng.step(12).empty());  // one-shot: nothing repeats
}

TEST_CASE("verification fails closed on any bit flip or shape mismatch") {
  TssEngine eng("grp", testSeed(6), 1);
  SignHashes msg = {sha256(Bytes{1}), sha256(Bytes{2})};
  REQUIRE(eng.startSigning("s", {0, 1}, msg, 10, 0).ok());
  REQUIRE(eng.approve("s", 0, msg, 1).ok());
  REQUIRE(eng.approve("s", 1, msg, 1).ok());
  Bytes sig = eng.sessionResult("s", 2)->signature;
  REQUIRE(TssEngine::verify(eng.groupKey(), msg, sig));
  CHECK(sig.size() == 4 + 2 * 64);

  // Every single-bit mutation of the signature blob must fail.
  for (std::size_t byte = 0; byte < sig.size(); ++byte) {
    for (int bit = 0; bit < 8; ++bit) {
      Bytes mutated = sig;
      mutated[byte] ^= static_cast<std::uint8_t>(1 << bit);
      CHECK_FALSE(TssEngine::verify(eng.groupKey(), msg, mutated));
    }
  }

  // Every single-bit mutation of the message must fail.
  for (int hash = 0; hash < 2; ++hash) {
    for (int bit = 0; bit < 8; ++bit) {
      SignHashes mutated = msg;
      mutated[hash][7] ^= static_cast<std::uint8_t>(1 << bit);
      CHECK_FALSE(TssEngine::verify(eng.groupKey(), mutated, sig));
    }
  }

  // Shape mismatches: truncation, padding, count lies, wrong hash count.
  CHECK_FALSE(TssEngine::verify(eng.groupKey(), msg, Bytes(sig.begin(), sig.end() - 1)));
  Bytes padded = sig;
  padded.push_back(0);
  CHECK_FALSE(TssEngine::verify(eng.groupKey(), msg, padded));
  CHECK_FALSE(TssEngine::verify(eng.groupKey(), {msg[0]}, sig));
  CHECK_FALSE(TssEngine::verify(eng.groupKey(), msg, Bytes{}));

  // A different seed gives a different group; its key rejects this signature.
  TssEngine other("grp2", testSeed(7), 1);
  CHECK_FALSE(TssEngine::verify(other.groupKey(), msg, sig));
}

TEST_CASE("session ids commit to request, signers, and message") {
  DepositIdentifier a{"evm-1", sha256(Bytes{1}), 0};
  DepositIdentifier b{"evm-1", sha256(Bytes{2}), 0};
  SignHashes m1 = oneHash(1);
  SignHashes m2 = oneHash(2);

  std::string base = tssSessionId(3, a, {0, 1}, m1);
  CHECK(base.rfind("sign/sid=3/", 0) == 0);
  CHECK(base.find(a.canonical()) != std::string::npos);
  CHECK(tssSessionId(4, a, {0, 1}, m1) != base);
  CHECK(tssSessionId(3, b, {0, 1}, m1) != base);
  CHECK(tssSessionId(3, a, {0, 2}, m1) != base);
  CHECK(tssSessionId(3, a, {0, 1}, m2) != base);
  CHECK(tssSessionId(3, a, {0, 1}, m1) == base);
}
