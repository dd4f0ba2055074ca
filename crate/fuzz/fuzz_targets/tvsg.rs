#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // anything that decodes must re-encode to the same bytes
    if let Ok(x) = tvstat::io::decode_tvsg(data) {
        let again = tvstat::io::encode_tvsg(&x).expect("decoded signal encodes");
        assert_eq!(tvstat::io::decode_tvsg(&again).expect("round trip").data(), x.data());
    }
});
