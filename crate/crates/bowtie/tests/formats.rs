use bowtie::datasets::load_polarity;
use bowtie::format::{format_bag, parse_bag, read_corpus, read_vocab, write_corpus, write_polarity, write_vocab};
use bowtie_core::{Corpus, LabeledBag, PolarityTable, Split, Vocabulary};
use proptest::prelude::*;

fn bag_strategy(width: u32) -> impl Strategy<Value = LabeledBag> {
    (prop::collection::btree_map(0..width, 1u32..50, 0..12), 0u8..2)
        .prop_map(|(m, label)| LabeledBag::new(m.into_iter().collect(), label).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bag_line_round_trip(bag in bag_strategy(500)) {
        prop_assert_eq!(parse_bag(&format_bag(&bag)).unwrap(), bag);
    }

    #[test]
    fn corpus_file_round_trip(bags in prop::collection::vec(bag_strategy(40), 0..30)) {
        let d = tempfile::tempdir().unwrap();
        let path = d.path().join("c.bow");
        let corpus = Corpus::new(bags, "t", 40, Split::Train).unwrap();
        write_corpus(&corpus, &path).unwrap();
        let back = read_corpus(&path, "t", 40, Split::Train).unwrap();
        prop_assert_eq!(back.bags(), corpus.bags());
    }

    #[test]
    fn shuffle_is_a_bijection(n in 0usize..60, seed in any::<u64>()) {
        let bags: Vec<LabeledBag> = (0..n as u32).map(|i| LabeledBag::new(vec![(i, i + 1)], (i % 2) as u8).unwrap()).collect();
        let corpus = Corpus::new(bags.clone(), "t", 60, Split::Train).unwrap();
        let a = corpus.clone().shuffle(seed);
        let again = corpus.clone().shuffle(seed);
        prop_assert_eq!(a.bags(), again.bags());
        let mut seen: Vec<u32> = a.bags().iter().map(|b| b.counts()[0].0).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n as u32).collect::<Vec<_>>());
    }

    #[test]
    fn polarity_file_is_exact(ratings in prop::collection::vec(-1e3f64..1e3, 1..40)) {
        let d = tempfile::tempdir().unwrap();
        let tokens: Vec<String> = (0..ratings.len()).map(|i| format!("t{i}")).collect();
        let vocab = Vocabulary::from_tokens(tokens).unwrap();
        let table = PolarityTable::new(ratings.clone(), &vocab).unwrap();
        write_vocab(&vocab, &d.path().join("v.txt")).unwrap();
        write_polarity(&table, &d.path().join("p.txt")).unwrap();
        let vocab2 = read_vocab(&d.path().join("v.txt")).unwrap();
        prop_assert_eq!(vocab2.tokens(), vocab.tokens());
        let back = load_polarity(&d.path().join("p.txt"), &vocab2).unwrap();
        let a: Vec<u64> = back.ratings().iter().map(|r| r.to_bits()).collect();
        let b: Vec<u64> = ratings.iter().map(|r| r.to_bits()).collect();
        prop_assert_eq!(a, b);
    }
}
