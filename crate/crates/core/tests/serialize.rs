use flexhe::heaan;
use flexhe::keys::{encrypt, sampling, Encoder, KeyGenerator};
use flexhe::params::{Context, ParamSet};
use flexhe::scale::Scale;
use flexhe::serialize::{self, Header, Kind, VERSION};
use flexhe::Error;

#[test]
fn everything_round_trips() {
    let ctx = Context::new(ParamSet::custom("toy-split", 6, 5, 4, 40)).unwrap();
    let kg = KeyGenerator::new(&ctx, 3);
    let sk = kg.secret_key().unwrap();
    let pk = kg.public_key(&sk).unwrap();
    let keys = kg.eval_keys(&sk, &[1, 2]).unwrap();
    let enc = Encoder::new(ctx.degree()).unwrap();
    let pt = enc.encode_real(&[0.5, -0.25], &Scale::pow2(40)).unwrap();
    let ct = encrypt(&ctx, &pk, &pt, 3, &mut sampling::stream(2, 2)).unwrap();
    let ct = heaan::rescale(&ctx, &heaan::mult_relin(&ctx, &ct, &ct, &keys).unwrap()).unwrap();

    let mut buf = Vec::new();
    serialize::write_ciphertext(&ctx, &ct, &mut buf).unwrap();
    assert_eq!(Header::parse(&buf).unwrap().kind, Kind::Ciphertext);
    let back = serialize::read_ciphertext(&ctx, &buf).unwrap();
    assert_eq!(back.parts(), ct.parts());
    assert!(back.scale().same_value(ct.scale()));

    let mut buf = Vec::new();
    serialize::write_secret_key(&ctx, &sk, &mut buf).unwrap();
    assert_eq!(serialize::read_secret_key(&ctx, &buf).unwrap().coeffs(), sk.coeffs());

    let mut buf = Vec::new();
    serialize::write_public_key(&ctx, &pk, &mut buf).unwrap();
    let pk2 = serialize::read_public_key(&ctx, &buf).unwrap();
    assert_eq!((pk2.b, pk2.a), (pk.b.clone(), pk.a.clone()));

    let mut buf = Vec::new();
    serialize::write_eval_keys(&ctx, &keys, &mut buf).unwrap();
    let keys2 = serialize::read_eval_keys(&ctx, &buf).unwrap();
    assert_eq!(keys2.galois_elements().collect::<Vec<_>>(), keys.galois_elements().collect::<Vec<_>>());
    let (a, b) = (keys.relin().unwrap(), keys2.relin().unwrap());
    for i in 0..a.digits() {
        assert_eq!((a.secret(i), a.uniform(i)), (b.secret(i), b.uniform(i)));
    }
    // half the key material is never written
    let per_poly = 8 * ctx.degree() * (ctx.max_level() + 1);
    assert!(buf.len() < 3 * ctx.max_level() * per_poly + 200);
}

#[test]
fn headers_are_checked() {
    let ctx = Context::new(ParamSet::custom("toy", 5, 5, 3, 40)).unwrap();
    let other = Context::new(ParamSet::custom("toy", 5, 5, 4, 40)).unwrap();
    let sk = KeyGenerator::new(&ctx, 1).secret_key().unwrap();
    let mut buf = Vec::new();
    serialize::write_secret_key(&ctx, &sk, &mut buf).unwrap();

    assert!(matches!(serialize::read_secret_key(&other, &buf), Err(Error::Mismatch(_))));
    assert!(matches!(serialize::read_public_key(&ctx, &buf), Err(Error::Malformed(_))));

    let mut bumped = buf.clone();
    bumped[4..6].copy_from_slice(&(VERSION + 1).to_le_bytes());
    assert!(matches!(
        serialize::read_secret_key(&ctx, &bumped),
        Err(Error::VersionMismatch { expected: VERSION, found }) if found == VERSION + 1
    ));

    let mut bad_magic = buf.clone();
    bad_magic[0] = b'X';
    assert!(matches!(Header::parse(&bad_magic), Err(Error::Malformed(_))));

    let mut trailing = buf.clone();
    trailing.push(0);
    assert!(serialize::read_secret_key(&ctx, &trailing).is_err());
    assert!(serialize::read_secret_key(&ctx, &buf[..buf.len() - 1]).is_err());
}
