"""
Винятки предметної області
"""


class ConfigurationError(ValueError):
    """Некоректна конфігурація експерименту (код виходу CLI 2)"""


class EnumerationBudgetError(ValueError):
    """Повний перебір станів перевищує дозволений бюджет"""


class UnattainableBiasError(ValueError):
    """Цільовий зсув виходу недосяжний для даного сімейства мереж"""


class NumericalBreakdownError(ArithmeticError):
    """
    Чисельний збій ядра BP.

    Виникає, коли V падає до порогу або нижче чи повідомлення стають
    нескінченними. Атрибут step містить номер ітерації BP (None поза рушієм).
    """

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        if step is not None:
            message = f"крок {step}: {message}"
        super().__init__(message)
