#include "bridgesim/chain_client.hpp"
#include "doctest.h"

using namespace bridgesim;

namespace {

struct SignerRig {
  TssEngine eng;
  int counter = 0;

  SignerRig() : eng("grp", makeSeed(), 1) {}

  static Seed32 makeSeed() {
    Seed32 s{};
    s.fill(0x6b);
    return s;
  }

  GroupKey key() const { return eng.groupKey(); }

  Bytes sign(const SignHashes& msg) {
    std::string id = "rig-" + std::to_string(counter++);
    REQUIRE(eng.startSigning(id, {0}, msg, 1 << 20, 0).ok());
    REQUIRE(eng.approve(id, 0, msg, 0).ok());
    return eng.sessionResult(id, 1)->signature;
  }
};

}  // namespace

TEST_CASE("evm client: deposit lookup walks the full failure ladder") {
  SignerRig rig;
  EvmChain chain("evm-1", "0xbridge", rig.key());
  chain.creditNative("0xalice", 1000);
  EvmChainClient client(&chain, 3);
  CHECK(client.requiredConfirmations() == 3);
  CHECK(client.kind() == ChainKind::evm);

  CHECK(client.getDepositData({"evm-1", sha256(Bytes{0}), 0}).error() == Err::NotFound);

  auto tx = chain.depositNative("0xalice", 100, "btc-1", "btc-bob");
  REQUIRE(tx.ok());
  chain.advanceBlock();
  CHECK(client.getDepositData({"evm-1", *tx, 0}).error() == Err::NotConfirmed);
  chain.advanceBlock();
  chain.advanceBlock();

  CHECK(client.getDepositData({"evm-1", *tx, 5}).error() == Err::NoSuchEvent);

  EvmChain::Event stray;
  stray.kind = EvmChain::Event::Kind::depositNative;
  stray.emitter = "0xliar";
  stray.amount = 5;
  Hash32 fake = chain.injectFabricatedTx("0xmallory", {stray});
  EvmChain::Event wrongKind;
  wrongKind.kind = EvmChain::Event::Kind::withdrawal;
  wrongKind.emitter = "0xbridge";
  Hash32 fake2 = chain.injectFabricatedTx("0xmallory", {wrongKind});
  for (int i = 0; i < 3; ++i) chain.advanceBlock();
  CHECK(client.getDepositData({"evm-1", fake, 0}).error() == Err::WrongAddress);
  CHECK(client.getDepositData({"evm-1", fake2, 0}).error() == Err::WrongEventKind);

  auto d = client.getDepositData({"evm-1", *tx, 0});
  REQUIRE(d.ok());
  CHECK(d->sourceChainId == "evm-1");
  CHECK(d->sender == "0xalice");
  CHECK(d->tokenAddr.empty());  // native transfers carry no token address
  CHECK(d->amount == 100);
  CHECK(d->targetChainId == "btc-1");
  CHECK(d->targetAddr == "btc-bob");
}

TEST_CASE("utxo client: deposit lookup reads payment plus data carrier") {
  SignerRig rig;
  UtxoChain chain("btc-1", "btc-bridge", rig.key());
  Outpoint coin = chain.addGenesisOutput("btc-alice", 100);
  UtxoChainClient client(&chain, 2);

  UtxoTx dep;
  dep.vin.push_back(coin);
  dep.vout.push_back({70, "btc-bridge", std::nullopt});
  dep.vout.push_back({0, "", encodeTargetInfo("evm-1", "0xbob")});
  dep.vout.push_back({30, "btc-alice", std::nullopt});
  dep.witnesses.resize(1, {WitnessEntry::Kind::clientMark, {}});
  auto txid = chain.submitTx(dep);
  REQUIRE(txid.ok());

  CHECK(client.getDepositData({"btc-1", sha256(Bytes{0}), 0}).error() == Err::NotFound);
  chain.advanceBlock();
  CHECK(client.getDepositData({"btc-1", *txid, 0}).error() == Err::NotConfirmed);
  chain.advanceBlock();

  CHECK(client.getDepositData({"btc-1", *txid, 9}).error() == Err::NoSuchEvent);
  CHECK(client.getDepositData({"btc-1", *txid, 1}).error() == Err::WrongAddress);  // data output
  CHECK(client.getDepositData({"btc-1", *txid, 2}).error() == Err::WrongAddress);  // change

  auto d = client.getDepositData({"btc-1", *txid, 0});
  REQUIRE(d.ok());
  CHECK(d->amount == 70);
  CHECK(d->sender == "btc-alice");
  CHECK(d->targetChainId == "evm-1");
  CHECK(d->targetAddr == "0xbob");

  // Payment without a following data output, and with a garbage one.
  Outpoint coin2 = chain.addGenesisOutput("btc-alice", 20);
  UtxoTx bare;
  bare.vin.push_back(coin2);
  bare.vout.push_back({20, "btc-bridge", std::nullopt});
  bare.witnesses.resize(1, {WitnessEntry::Kind::clientMark, {}});
  auto bareId = chain.submitTx(bare);
  REQUIRE(bareId.ok());

  Outpoint coin3 = chain.addGenesisOutput("btc-alice", 21);
  UtxoTx garbage;
  garbage.vin.push_back(coin3);
  garbage.vout.push_back({21, "btc-bridge", std::nullopt});
  garbage.vout.push_back({0, "", Bytes{1, 2}});
  garbage.witnesses.resize(1, {WitnessEntry::Kind::clientMark, {}});
  auto garbageId = chain.submitTx(garbage);
  REQUIRE(garbageId.ok());

  chain.advanceBlock();
  chain.advanceBlock();
  CHECK(client.getDepositData({"btc-1", *bareId, 0}).error() == Err::MissingOpReturn);
  CHECK(client.getDepositData({"btc-1", *garbageId, 0}).error() == Err::MalformedOpReturn);
}

TEST_CASE("burn-emit client: only confirmed burns with a sound entry resolve") {
  SignerRig rig;
  BurnEmitChain chain("zec-1", rig.key());
  chain.createAsset("ast", {{"z-alice", 500}});
  BurnEmitChainClient client(&chain, 2);

  CHECK(client.getDepositData({"zec-1", sha256(Bytes{0}), 0}).error() == Err::NotFound);

  auto burn = chain.submitBurn("z-alice", "ast", 90, {encodeTargetInfo("evm-1", "0xbob")});
  auto bare = chain.submitBurn("z-alice", "ast", 10, {});
  auto junk = chain.submitBurn("z-alice", "ast", 10, {Bytes{9}});
  auto other = chain.submitOther("z-alice", {encodeTargetInfo("evm-1", "0xbob")});
  REQUIRE(burn.ok());
  chain.advanceBlock();
  CHECK(client.getDepositData({"zec-1", *burn, 0}).error() == Err::NotConfirmed);
  chain.advanceBlock();

  CHECK(client.getDepositData({"zec-1", *burn, 1}).error() == Err::NoSuchEvent);
  CHECK(client.getDepositData({"zec-1", *other, 0}).error() == Err::NotABurn);
  CHECK(client.getDepositData({"zec-1", *bare, 0}).error() == Err::BadServiceEntry);
  CHECK(client.getDepositData({"zec-1", *junk, 0}).error() == Err::BadServiceEntry);

  auto d = client.getDepositData({"zec-1", *burn, 0});
  REQUIRE(d.ok());
  CHECK(d->tokenAddr == "ast");  // the asset rides in the token field
  CHECK(d->amount == 90);
  CHECK(d->sender == "z-alice");
  CHECK(d->targetAddr == "0xbob");
}

TEST_CASE("coin selection is a greedy prefix of the owner's confirmed coins") {
  SignerRig rig;
  UtxoChain chain("btc-1", "btc-bridge", rig.key());
  for (int i = 0; i < 3; ++i) chain.addGenesisOutput("owner", 10);
  chain.addGenesisOutput("other", 1000);

  auto ownedInOrder = [&] {
    std::vector<Outpoint> ops;
    for (const auto& [op, out] : chain.utxoSet())
      if (out.address == "owner") ops.push_back(op);
    return ops;
  }();
  REQUIRE(ownedInOrder.size() == 3);

  auto one = selectUtxos(chain, "owner", 5, {});
  REQUIRE(one.ok());
  CHECK(*one == std::vector<Outpoint>{ownedInOrder[0]});

  auto all = selectUtxos(chain, "owner", 25, {});
  REQUIRE(all.ok());
  CHECK(*all == ownedInOrder);

  auto skipped = selectUtxos(chain, "owner", 15, {ownedInOrder[0]});
  REQUIRE(skipped.ok());
  CHECK(*skipped == std::vector<Outpoint>{ownedInOrder[1], ownedInOrder[2]});

  CHECK(selectUtxos(chain, "owner", 31, {}).error() == Err::InsufficientFunds);
  CHECK(selectUtxos(chain, "owner", 25, {ownedInOrder[0]}).error() == Err::InsufficientFunds);
  CHECK(selectUtxos(chain, "nobody", 1, {}).error() == Err::InsufficientFunds);
}

TEST_CASE("utxo withdrawal construction is a pure function of chain state") {
  SignerRig rig;
  UtxoChain chain("btc-1", "btc-bridge", rig.key());
  chain.addGenesisOutput("btc-bridge", 50);
  chain.addGenesisOutput("btc-bridge", 50);

  DepositData d;
  d.sourceChainId = "evm-1";
  d.depositTxHash = sha256(Bytes{1});
  d.txNonce = 0;
  d.amount = 60;
  d.targetChainId = "btc-1";
  d.targetAddr = "btc-bob";

  // Eight fresh clients agree byte for byte on the unsigned transaction.
  UtxoChainClient first(&chain, 1);
  auto firstTx = first.getWithdrawalTx(d);
  REQUIRE(firstTx.ok());
  for (int i = 0; i < 7; ++i) {
    UtxoChainClient c(&chain, 1);
    auto tx = c.getWithdrawalTx(d);
    REQUIRE(tx.ok());
    CHECK(coreSerialize(*tx) == coreSerialize(*firstTx));
  }

  REQUIRE(firstTx->vin.size() == 2);  // 50 + 50 covers 60
  REQUIRE(firstTx->vout.size() == 2);
  CHECK(firstTx->vout[0].value == 60);
  CHECK(firstTx->vout[0].address == "btc-bob");
  CHECK(firstTx->vout[1].value == 40);  // change returns to the vault
  CHECK(firstTx->vout[1].address == "btc-bridge");
  CHECK(firstTx->witnesses.size() == 2);

  auto hashes = first.getHashOfWithdrawal(d);
  REQUIRE(hashes.ok());
  REQUIRE(hashes->size() == 2);
  for (std::uint32_t i = 0; i < 2; ++i) {
    auto prev = chain.lookupOutput(firstTx->vin[i]);
    REQUIRE(prev.ok());
    CHECK((*hashes)[i] == sighashForInput(coreSerialize(*firstTx), i, scriptBytes(*prev)));
    CHECK(*UtxoChainClient::computeSighash(*firstTx, i, chain) == (*hashes)[i]);
  }
  CHECK(UtxoChainClient::computeSighash(*firstTx, 5, chain).error() == Err::IndexOutOfRange);
}

TEST_CASE("signature blobs split into one standalone witness per input") {
  SignerRig rig;
  UtxoChain chain("btc-1", "btc-bridge", rig.key());
  chain.addGenesisOutput("btc-bridge", 30);
  chain.addGenesisOutput("btc-bridge", 30);
  UtxoChainClient client(&chain, 1);

  DepositData d;
  d.sourceChainId = "evm-1";
  d.depositTxHash = sha256(Bytes{2});
  d.amount = 60;
  d.targetChainId = "btc-1";
  d.targetAddr = "btc-bob";

  auto tx = client.getWithdrawalTx(d);
  REQUIRE(tx.ok());
  auto hashes = client.getHashOfWithdrawal(d);
  REQUIRE(hashes.ok());
  Bytes blob = rig.sign(*hashes);

  CHECK(UtxoChainClient::injectSignatures(*tx, Bytes{1}).error() == Err::BadSignature);
  Bytes short1 = rig.sign({(*hashes)[0]});
  CHECK(UtxoChainClient::injectSignatures(*tx, short1).error() == Err::BadSignature);
  Bytes padded = blob;
  padded.push_back(0);
  CHECK(UtxoChainClient::injectSignatures(*tx, padded).error() == Err::BadSignature);

  auto wired = UtxoChainClient::injectSignatures(*tx, blob);
  REQUIRE(wired.ok());
  REQUIRE(wired->witnesses.size() == 2);
  for (std::uint32_t i = 0; i < 2; ++i) {
    CHECK(wired->witnesses[i].kind == WitnessEntry::Kind::groupSig);
    CHECK(wired->witnesses[i].data.size() == 4 + 64);
    CHECK(TssEngine::verify(rig.key(), {(*hashes)[i]}, wired->witnesses[i].data));
  }
  CHECK(txidOf(*wired) == txidOf(*tx));
}

TEST_CASE("utxo withdrawal submission locks inputs until the spend confirms") {
  SignerRig rig;
  UtxoChain chain("btc-1", "btc-bridge", rig.key());
  chain.addGenesisOutput("btc-bridge", 100);
  chain.addGenesisOutput("btc-bridge", 100);
  UtxoChainClient client(&chain, 1);

  DepositData d;
  d.sourceChainId = "evm-1";
  d.depositTxHash = sha256(Bytes{3});
  d.amount = 80;
  d.targetChainId = "btc-1";
  d.targetAddr = "btc-bob";
  auto hashes = client.getHashOfWithdrawal(d);
  REQUIRE(hashes.ok());

  auto txid = client.submitWithdrawal(d, rig.sign(*hashes));
  REQUIRE(txid.ok());
  CHECK(client.lockedInputs().size() == 1);  // one 100-coin covered the payout

  // While the spend is pending, a second payout must draw from other coins.
  DepositData d2 = d;
  d2.depositTxHash = sha256(Bytes{4});
  auto tx2 = client.getWithdrawalTx(d2);
  REQUIRE(tx2.ok());
  CHECK(tx2->vin[0] != client.lockedInputs().begin()->first);

  client.pruneLocks();
  CHECK(client.lockedInputs().size() == 1);  // still in the mempool, kept
  chain.advanceBlock();
  client.pruneLocks();
  CHECK(client.lockedInputs().empty());  // mined, lock released

  auto view = chain.getTransaction(*txid);
  REQUIRE(view.ok());
  CHECK(view->confirmations == 1);
  CHECK(chain.utxoTotal() == 200);
}

TEST_CASE("target address shape checks per chain family") {
  SignerRig rig;
  EvmChain evm("evm-1", "0xbridge", rig.key());
  UtxoChain utxo("btc-1", "btc-bridge", rig.key());
  BurnEmitChain be("zec-1", rig.key());
  EvmChainClient ec(&evm, 1);
  UtxoChainClient uc(&utxo, 1);
  BurnEmitChainClient bc(&be, 1);

  CHECK(ec.validTargetAddress("0xbob"));
  CHECK_FALSE(ec.validTargetAddress("bob"));
  CHECK_FALSE(ec.validTargetAddress("0x"));
  CHECK(uc.validTargetAddress("anything"));
  CHECK_FALSE(uc.validTargetAddress(""));
  CHECK(bc.validTargetAddress("z-addr"));
  CHECK_FALSE(bc.validTargetAddress(""));
  CHECK(ec.validTargetAmount(1));
  CHECK_FALSE(ec.validTargetAmount(0));
}
