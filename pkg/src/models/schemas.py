"""Pydantic models for reports, knowledge entries and analysis results."""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field

from ..config.settings import Language


class WordClass(StrEnum):
    collision_verb = "collision-verb"
    motion_verb = "motion-verb"
    stop_verb = "stop-verb"
    avoidance_verb = "avoidance-verb"
    intention_verb = "intention-verb"
    signal_verb = "signal-verb"
    perception_verb = "perception-verb"
    ability_modal = "ability-modal"
    negation_marker = "negation-marker"
    speed_intensifier = "speed-intensifier"
    surprise_lexeme = "surprise-lexeme"
    suddenness_adverb = "suddenness-adverb"
    unexpectedness_adverb = "unexpectedness-adverb"
    blame_lexeme = "blame-lexeme"
    passive_marker = "passive-marker"
    reflexive_motion_verb = "reflexive-motion-verb"
    impact_noun = "impact-noun"
    vehicle_noun = "vehicle-noun"
    person_noun = "person-noun"
    part_noun = "part-noun"
    determiner = "determiner"
    pronoun = "pronoun"
    function_word = "function-word"
    significant_modifier = "significant-modifier"
    attenuating_circumstance = "attenuating-circumstance"

    @property
    def is_verb(self) -> bool:
        return self in VERB_CLASSES

    @property
    def is_noun(self) -> bool:
        return self in NOUN_CLASSES


VERB_CLASSES = frozenset(
    {
        WordClass.collision_verb,
        WordClass.motion_verb,
        WordClass.stop_verb,
        WordClass.avoidance_verb,
        WordClass.intention_verb,
        WordClass.signal_verb,
        WordClass.perception_verb,
        WordClass.reflexive_motion_verb,
    }
)
NOUN_CLASSES = frozenset({WordClass.vehicle_noun, WordClass.person_noun, WordClass.part_noun})


class Selectional(StrEnum):
    requires_agent = "requires-agent"
    requires_physical_object = "requires-physical-object"
    neutral = "neutral"


class Definiteness(StrEnum):
    indefinite = "indefinite"
    definite = "definite"
    possessive = "possessive"
    pronoun_1st = "pronoun-1st"
    pronoun_3rd = "pronoun-3rd"
    label = "label"


class Facet(StrEnum):
    vehicle = "vehicle"
    driver = "driver"
    passenger_group = "passenger-group"
    part = "part"
    unresolved = "unresolved"


class GrammaticalRole(StrEnum):
    subject = "subject"
    object = "object"
    oblique = "oblique"
    unknown = "unknown"


class Possessor(StrEnum):
    first = "first"
    third = "third"


class Polarity(StrEnum):
    positive = "positive"
    negated = "negated"


class Modality(StrEnum):
    none = "none"
    ability = "ability"


class Aspect(StrEnum):
    simple = "simple"
    pluperfect = "pluperfect"
    progressive = "progressive"
    intentional = "intentional"


class ImpactStatus(StrEnum):
    explicit = "explicit"
    inferred = "inferred"
    absent = "absent"


class EvidenceKind(StrEnum):
    collision_lexeme = "collision-lexeme"
    neg_ability_avoidance = "neg-ability-avoidance"
    neg_ability_stop = "neg-ability-stop"
    parameter_c_default = "parameter-c-default"


class Strategy(StrEnum):
    A = "A"
    B = "B"


class DeviceKind(StrEnum):
    implicit_rule_violation = "implicit-rule-violation"
    explicit_blame_lexeme = "explicit-blame-lexeme"
    excessive_speed = "excessive-speed"
    surprise_lexeme = "surprise-lexeme"
    suddenness = "suddenness"
    neg_ability_contrast = "neg-ability-contrast"
    agent_suppression = "agent-suppression"
    unexpectedness_adverb = "unexpectedness-adverb"
    attenuating_circumstance = "attenuating-circumstance"
    correct_behavior_assertion = "correct-behavior-assertion"


DEVICE_STRATEGY: dict[DeviceKind, Strategy] = {
    DeviceKind.implicit_rule_violation: Strategy.A,
    DeviceKind.explicit_blame_lexeme: Strategy.A,
    DeviceKind.excessive_speed: Strategy.A,
    DeviceKind.surprise_lexeme: Strategy.B,
    DeviceKind.suddenness: Strategy.B,
    DeviceKind.neg_ability_contrast: Strategy.B,
    DeviceKind.agent_suppression: Strategy.B,
    DeviceKind.unexpectedness_adverb: Strategy.B,
    DeviceKind.attenuating_circumstance: Strategy.B,
}


class AmbiguityKind(StrEnum):
    lexical = "lexical"
    pluperfect_reference = "pluperfect-reference"
    intention_vs_action = "intention-vs-action"


class WriterBehavior(StrEnum):
    correct = "correct"
    at_fault = "at-fault"
    neutral = "neutral"


class WarningKind(StrEnum):
    missing_second_participant = "missing-second-participant"
    empty_body = "empty-body"
    fragment = "fragment"
    text_too_long = "text-too-long"
    no_accident_lexeme = "no-accident-lexeme"


class Span(BaseModel):
    """Half-open range, either character offsets or token indices."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(..., description="First position", ge=0)
    end: int = Field(..., description="Position after the last one", ge=0)

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


class LexiconEntry(BaseModel):
    """One word-class reading of a lemma."""

    model_config = ConfigDict(frozen=True)

    language: Language = Field(default=Language.en, description="Language tag")
    lemma: str = Field(..., description="Lowercase lemma, multi-word lemmas space-joined", min_length=1)
    word_class: WordClass = Field(..., description="Word class")
    concept: str | None = Field(default=None, description="Concept id in the type hierarchy")
    selectional: Selectional | None = Field(default=None, description="Selectional constraint of a predicate")

    @property
    def length(self) -> int:
        return len(self.lemma.split())


class LexemeMatch(BaseModel):
    """Lexicon entry matched over a run of token lemmas."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(..., description="Index of the first matched token", ge=0)
    end: int = Field(..., description="Index after the last matched token", ge=0)
    entry: LexiconEntry


class TrafficRule(BaseModel):
    """Opaque traffic rule referenced by violation and conformity patterns."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Rule id", min_length=1)
    description: str = Field(..., description="Human readable rule text")
    violation_patterns: tuple[str, ...] = Field(default=(), description="Pattern ids implying the rule")


class AmbiguousReading(BaseModel):
    """Row of the ambiguous token table."""

    model_config = ConfigDict(frozen=True)

    language: Language
    lemma: str
    label: str
    writer_behavior: WriterBehavior
    explains_accident: bool


class Report(BaseModel):
    """A claim report text."""

    id: str = Field(..., description="Report id derived from the file stem", min_length=1)
    language: Language = Field(default=Language.en, description="Language tag")
    body: str = Field(default="", description="Report text")
    fragment: bool | None = Field(
        default=None,
        description="Whether the report is an excerpt of a longer one, unset to judge from the text",
    )


class Token(BaseModel):
    """Token with exact character offsets into the report body."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., description="Position in the report token list", ge=0)
    surface: str = Field(..., description="Text as written")
    lemma: str = Field(..., description="Lemma after irregular-form or contraction lookup")
    span: Span = Field(..., description="Character offsets")


class Clause(BaseModel):
    """Clause-level token group."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., description="Clause ordinal within the report", ge=0)
    sentence_index: int = Field(..., description="Sentence ordinal", ge=0)
    clause_index: int = Field(..., description="Clause ordinal within its sentence", ge=0)
    tokens: tuple[Token, ...] = Field(..., description="Ordered tokens")

    @property
    def span(self) -> Span:
        return Span(start=self.tokens[0].span.start, end=self.tokens[-1].span.end)

    @property
    def lemmas(self) -> list[str]:
        return [token.lemma for token in self.tokens]

    def text(self, body: str) -> str:
        return body[self.span.start : self.span.end]


class Mention(BaseModel):
    """Referring expression."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(..., description="Position in the report mention list", ge=0)
    text: str = Field(..., description="Surface text")
    tokens: Span = Field(..., description="Token index range")
    span: Span = Field(..., description="Character offsets")
    head_lemma: str = Field(..., description="Lemma of the head")
    definiteness: Definiteness
    concept: str = Field(..., description="Concept id of the head")
    facet: Facet = Field(default=Facet.unresolved)
    grammatical_role: GrammaticalRole = Field(default=GrammaticalRole.unknown)
    clause: int = Field(..., description="Clause ordinal", ge=0)
    sentence: int = Field(..., description="Sentence ordinal", ge=0)
    possessor: Possessor | None = Field(default=None, description="Person of a possessive determiner")
    label: str | None = Field(default=None, description="A/B naming convention label")
    contrastive: bool = Field(default=False, description="Modified by an ordinal or 'other', as in 'the last vehicle'")

    @property
    def is_writer_marked(self) -> bool:
        """First person pronoun, first person possessive or label A."""
        return (
            self.definiteness == Definiteness.pronoun_1st
            or self.possessor == Possessor.first
            or self.label == "A"
        )


class CoercionRecord(BaseModel):
    """Metonymic facet shift forced by a predicate."""

    model_config = ConfigDict(frozen=True)

    mention: int = Field(..., description="Mention id")
    from_facet: Facet
    to_facet: Facet
    trigger: Selectional
    predicate_lemma: str


class DiscourseEntity(BaseModel):
    """Minimality-resolved vehicle unit."""

    id: int = Field(..., ge=0)
    mentions: list[Mention] = Field(default_factory=list, description="Member mentions in text order")
    unit_concept: str = Field(..., description="Most specific concept covering the non-part mentions")
    facets_seen: list[Facet] = Field(default_factory=list)
    is_writer_party: bool = False
    coercions: list[CoercionRecord] = Field(default_factory=list)

    @property
    def mention_ids(self) -> tuple[int, ...]:
        return tuple(mention.id for mention in self.mentions)


class Partition(BaseModel):
    """Entities covering every mention exactly once."""

    entities: list[DiscourseEntity] = Field(default_factory=list)
    cost: int = Field(default=0, ge=0)

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(entity.mention_ids for entity in self.entities)

    def entity_of(self, mention_id: int) -> DiscourseEntity | None:
        for entity in self.entities:
            if mention_id in entity.mention_ids:
                return entity
        return None


class Event(BaseModel):
    """Clause-level predicate instance."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=0)
    clause: int = Field(..., description="Clause ordinal", ge=0)
    predicate_lemma: str
    predicate_class: WordClass
    span: Span = Field(..., description="Character offsets of the predicate")
    tokens: Span = Field(..., description="Token range of the predicate")
    polarity: Polarity = Polarity.positive
    modality: Modality = Modality.none
    aspect: Aspect = Aspect.simple
    agent: int | None = Field(default=None, description="Entity id of the subject")
    patient: int | None = Field(default=None, description="Entity id of the object")


class ImpactEvidence(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: EvidenceKind
    clause: int | None = Field(default=None, description="Clause ordinal, unset for the default evidence")


class ImpactFinding(BaseModel):
    """Whether and how the accident is found in the text."""

    status: ImpactStatus
    evidence: list[ImpactEvidence] = Field(default_factory=list)
    participants: tuple[int, int] | None = Field(default=None, description="Entity ids of the colliding units")


class ArgDevice(BaseModel):
    """Argumentative device found in the text."""

    model_config = ConfigDict(frozen=True)

    strategy: Strategy
    kind: DeviceKind
    span: Span = Field(..., description="Character offsets of the trigger")
    tokens: Span = Field(..., description="Token range of the trigger")
    clause: int = Field(..., ge=0)
    rule: str | None = Field(default=None, description="Traffic rule id")
    note: str = ""
    self_exculpatory: bool = False


class Reading(BaseModel):
    label: str
    writer_behavior: WriterBehavior
    explains_accident: bool
    chosen: bool = False
    gloss: str = ""


class AmbiguitySite(BaseModel):
    """Text position with competing readings."""

    kind: AmbiguityKind
    span: Span
    tokens: Span
    clause: int = Field(..., ge=0)
    readings: list[Reading] = Field(..., min_length=2)
    note: str = ""

    @property
    def chosen(self) -> Reading | None:
        return next((reading for reading in self.readings if reading.chosen), None)


class SignificantModifier(BaseModel):
    """Modifier that a short report only includes when it matters."""

    lemma: str
    span: Span
    clause: int


class DeviceTally(BaseModel):
    strategy: Strategy
    kind: DeviceKind
    span: Span


class StrategySummary(BaseModel):
    """Device counts per strategy and per kind."""

    a_count: int = 0
    b_count: int = 0
    by_kind: dict[str, int] = Field(default_factory=dict)
    devices: list[DeviceTally] = Field(default_factory=list)


class AnalysisReport(BaseModel):
    """Full analysis of one report."""

    report_id: str
    entities: list[DiscourseEntity] = Field(default_factory=list)
    events: list[Event] = Field(default_factory=list)
    impact: ImpactFinding | None = None
    devices: list[ArgDevice] = Field(default_factory=list)
    ambiguity_sites: list[AmbiguitySite] = Field(default_factory=list)
    warnings: list[WarningKind] = Field(default_factory=list)
    strategy_summary: StrategySummary = Field(default_factory=StrategySummary)
    significant_modifiers: list[SignificantModifier] = Field(default_factory=list)


class GoldAnnotation(BaseModel):
    """Hand-frozen expected outcome for one corpus report."""

    model_config = ConfigDict(extra="forbid")

    report_id: str = Field(..., min_length=1)
    expected_entity_count: int = Field(..., description="Exact entity count", ge=0)
    expected_impact_status: ImpactStatus
    expected_clue_kinds: list[EvidenceKind] = Field(default_factory=list)
    expected_device_kinds: list[DeviceKind] = Field(default_factory=list)
    expected_chosen_readings: list[str] = Field(default_factory=list)


class CorpusRow(BaseModel):
    """One line of the corpus comparison table."""

    report_id: str
    entities: int
    impact: ImpactStatus | None
    a_count: int
    b_count: int
    ambiguity: list[str] = Field(default_factory=list)
    has_gold: bool = True
    mismatches: list[str] = Field(default_factory=list)
    extra_devices: list[DeviceKind] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


class CorpusRun(BaseModel):
    rows: list[CorpusRow] = Field(default_factory=list)

    @property
    def exit_status(self) -> int:
        return 1 if any(not row.passed for row in self.rows) else 0
