/// Resource ceilings shared by the enumerating and product constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Automaton states created by determinization and product constructions.
    pub states: usize,
    /// Group elements held in a Cayley ball.
    pub elements: usize,
    /// Words or pairs produced by a bounded enumeration.
    pub output: usize,
    /// Configurations visited by relation membership search.
    pub search: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            states: 100_000,
            elements: 2_000_000,
            output: 5_000_000,
            search: 10_000_000,
        }
    }
}
