class Knob:
    """Define um limite ajustável de uma execução (orçamento, grau, altura)."""
    def __init__(self, default_value: int, min_value: int, max_value: int, label: str):
        self.default_value = default_value
        self.min_value = min_value
        self.max_value = max_value
        self._value = default_value
        self.label = label

    @property
    def value(self) -> int:
        return self._value

    @value.setter
    def value(self, value):
        self._value = int(round(max(min(value, self.max_value), self.min_value)))

    def __str__(self):
        return f"{self.label}: {self.value}"


class KnobGroup(Knob):
    """
    Grupo de knobs controlados por um fator de 0 a 2: 1 mantém os padrões, 0 leva cada
    knob ao mínimo e 2 ao máximo, interpolando linearmente nos dois trechos.
    """
    def __init__(self, label: str, knobs: list[Knob] | None = None):
        self.knobs: dict[str, Knob] = {}
        super().__init__(1, 0, 2, label)
        for knob in knobs or []:
            self.add_knob(knob)

    def add_knob(self, knob: Knob):
        self.knobs[knob.label] = knob

    def __getitem__(self, label: str) -> Knob:
        return self.knobs[label]

    @property
    def value(self) -> float:
        return self._value

    @value.setter
    def value(self, value: float):
        self._value = max(min(float(value), self.max_value), self.min_value)
        for knob in self.knobs.values():
            knob.value = self.normalize(self._value, knob)

    def normalize(self, value: float, knob: Knob) -> float:
        def normalize_between(value: float, min_value: float, max_value: float) -> float:
            return value * (max_value - min_value) + min_value

        if value <= 1:
            return normalize_between(value, knob.min_value, knob.default_value)
        return normalize_between(value - 1, knob.default_value, knob.max_value)

    def values(self) -> dict:
        return {label: knob.value for label, knob in self.knobs.items()}

    def __str__(self):
        return f"{self.label} ×{self.value:.2f}: " + ", ".join(str(knob) for knob in self.knobs.values())


def budget_knobs() -> KnobGroup:
    """Orçamentos dos oráculos: dim A·dim M para a cisão, (dim M)³ para o traço."""
    return KnobGroup("budget", [
        Knob(200_000, 2_000, 20_000_000, "split_budget"),
        Knob(1_000_000, 10_000, 200_000_000, "trace_budget"),
    ])


def height_knob(max_root_height: int) -> Knob:
    return Knob(min(max_root_height + 2, 8), 1, 8, "height_bound")


def betti_knob(type_label: str) -> Knob:
    return Knob(6 if type_label.upper() == "A1" else 4, 0, 12, "betti_degree")


def samples_knob() -> Knob:
    return Knob(20, 1, 500, "relation_samples")
