"""
Форми валідації конфігурації експерименту
"""
from pathlib import Path

from decouple import Config, RepositoryEnv
from django import forms
from django.conf import settings
from django.core.exceptions import ValidationError

from coding_app.domain.bp import Task
from coding_app.domain.experiments import ExperimentConfig, ExperimentKind
from coding_app.domain.networks import MAX_TAU_UNITS, NetworkKind
from coding_app.exceptions import ConfigurationError


def _parse_float_list(value: str, name: str) -> tuple:
    items = [item.strip() for item in str(value).split(',') if item.strip()]
    if not items:
        raise ValidationError(f'Список {name} не може бути порожнім')
    try:
        return tuple(float(item) for item in items)
    except ValueError:
        raise ValidationError(f'Список {name} має містити числа через кому') from None


class ExperimentConfigForm(forms.Form):
    """
    Форма конфігурації експерименту.

    Приймає значення з командного рядка та файлу конфігурації, перевіряє
    діапазони й узгодженість полів і будує ExperimentConfig.
    """
    kind = forms.ChoiceField(label='Тип експерименту', choices=[(kind.value, kind.value) for kind in ExperimentKind])
    network = forms.ChoiceField(label='Мережа', choices=[(kind.value, kind.label) for kind in NetworkKind])
    K = forms.IntegerField(label='Приховані елементи K', min_value=1, max_value=MAX_TAU_UNITS)
    N = forms.IntegerField(label='Довжина повідомлення N', min_value=1)
    rates = forms.CharField(label='Швидкості R')
    M = forms.IntegerField(label='Довжина кодового слова M', min_value=1, required=False)
    p = forms.FloatField(label='Інверсія +1 (p)', min_value=0.0)
    r = forms.FloatField(label='Інверсія -1 (r)', min_value=0.0)
    bias = forms.FloatField(label='Зсув джерела')
    gamma = forms.CharField(label='Інерційний член γ')
    beta = forms.CharField(label='Обернена температура β', required=False)
    k = forms.FloatField(label='Поріг k', min_value=0.0, required=False)
    runs = forms.IntegerField(label='Прогони', min_value=1, required=False)
    restarts = forms.IntegerField(label='Перезапуски', min_value=1, required=False)
    messages = forms.IntegerField(label='Повідомлення', min_value=1, required=False)
    iters = forms.IntegerField(label='Ітерації BP', min_value=0, required=False)
    delta = forms.FloatField(label='Масштаб ініціалізації δ', min_value=0.0)
    seed = forms.IntegerField(label='Початкове зерно', min_value=0, max_value=2 ** 64 - 1)
    out = forms.CharField(label='Базовий шлях результатів')
    paper_scale = forms.BooleanField(label='Повний масштаб', required=False)
    workers = forms.IntegerField(label='Процеси', required=False)
    record = forms.BooleanField(label='Зберегти в базі', required=False)

    DEFAULTS = {
        'network': 'pth',
        'K': 1,
        'N': 1000,
        'rates': '0.25',
        'p': 0.1,
        'r': 0.2,
        'bias': 0.5,
        'gamma': '0',
        'delta': 0.1,
        'out': 'results',
        'paper_scale': False,
        'record': True,
    }

    LIST_FIELDS = ('rates', 'gamma', 'beta')

    @classmethod
    def field_names(cls) -> list[str]:
        return list(cls.base_fields)

    @classmethod
    def read_config_file(cls, path) -> dict:
        """
        Читає плаский файл key=value через python-decouple.

        Raises:
            ConfigurationError: Якщо файл відсутній або містить невідомі ключі
        """
        path = Path(path)
        if not path.is_file():
            raise ConfigurationError(f'Файл конфігурації не знайдено: {path}')
        repository = RepositoryEnv(str(path))
        unknown = sorted(set(repository.data) - set(cls.field_names()))
        if unknown:
            raise ConfigurationError(f'Невідомі ключі у файлі конфігурації: {", ".join(unknown)}')
        file_config = Config(repository)
        values = {}
        for name, field in cls.base_fields.items():
            if name not in repository.data:
                continue
            if isinstance(field, forms.BooleanField):
                values[name] = file_config(name, cast=bool)
            else:
                values[name] = file_config(name)
        return values

    @classmethod
    def from_sources(cls, cli_values: dict, config_path=None) -> 'ExperimentConfigForm':
        """
        Зводить значення: за замовчуванням < файл конфігурації < командний рядок.
        """
        data = dict(cls.DEFAULTS)
        if config_path:
            data.update(cls.read_config_file(config_path))
        data.update({key: value for key, value in cli_values.items() if value is not None})
        for name in cls.LIST_FIELDS:
            if isinstance(data.get(name), (list, tuple)):
                data[name] = ','.join(str(item) for item in data[name])
        return cls(data=data)

    def clean_rates(self):
        return _parse_float_list(self.cleaned_data['rates'], 'швидкостей')

    def clean_gamma(self):
        gammas = _parse_float_list(self.cleaned_data['gamma'], 'γ')
        if any(not 0.0 <= gamma < 1.0 for gamma in gammas):
            raise ValidationError('Кожне γ має лежати в [0, 1)')
        return gammas

    def clean_beta(self):
        if not self.cleaned_data.get('beta'):
            return None
        betas = _parse_float_list(self.cleaned_data['beta'], 'β')
        if any(beta <= 0 for beta in betas):
            raise ValidationError('Кожне β має бути додатним')
        return betas

    def clean_p(self):
        p = self.cleaned_data['p']
        if p >= 0.5:
            raise ValidationError('Ймовірність інверсії p має бути меншою за 0.5')
        return p

    def clean_r(self):
        r = self.cleaned_data['r']
        if r >= 0.5:
            raise ValidationError('Ймовірність інверсії r має бути меншою за 0.5')
        return r

    def clean_bias(self):
        bias = self.cleaned_data['bias']
        if not 0.0 < bias < 1.0:
            raise ValidationError('Зсув джерела має лежати в (0, 1)')
        return bias

    def clean_delta(self):
        delta = self.cleaned_data['delta']
        if delta >= 1.0:
            raise ValidationError('Масштаб ініціалізації має бути меншим за 1')
        return delta

    def clean(self):
        """Перевірка узгодженості полів"""
        cleaned_data = super().clean()
        kind = cleaned_data.get('kind')
        network = cleaned_data.get('network')
        K = cleaned_data.get('K')
        N = cleaned_data.get('N')
        rates = cleaned_data.get('rates')

        max_units = getattr(settings, 'BPCODE', {}).get('MAX_TAU_UNITS', MAX_TAU_UNITS)
        if K and K > max_units:
            self.add_error('K', f'K={K} перевищує межу точного перебору {max_units}')
        if K and N and N % K != 0:
            self.add_error('N', f'N={N} має ділитися на K={K}')
        if network == NetworkKind.CTH.value and K and K % 2 == 0:
            self.add_error('K', 'CTH визначена лише для непарного K')
        if network == NetworkKind.CTO.value and K and K < 2:
            self.add_error('K', 'CTO потребує K >= 2')
        if rates:
            if any(rate <= 0 for rate in rates):
                self.add_error('rates', 'Швидкості мають бути додатними')
            elif kind in (ExperimentKind.ECC_SWEEP.value, ExperimentKind.ECC_HIST.value) and any(rate > 1 for rate in rates):
                self.add_error('rates', 'Для ECC швидкість має лежати в (0, 1]')
        p, r = cleaned_data.get('p'), cleaned_data.get('r')
        if p is not None and r is not None and p + r >= 1.0:
            raise ValidationError('Канал вироджений: p + r >= 1')
        restarts = cleaned_data.get('restarts')
        if kind in (ExperimentKind.ECC_HIST.value, ExperimentKind.LC_HIST.value) and restarts is not None and restarts < 2:
            self.add_error('restarts', 'Гістограма потребує щонайменше двох перезапусків')
        return cleaned_data

    def to_config(self) -> ExperimentConfig:
        """
        Будує ExperimentConfig з перевірених даних.

        Raises:
            ConfigurationError: Якщо форма не пройшла валідацію
        """
        if not self.is_valid():
            problems = '; '.join(
                f'{field}: {" ".join(messages)}' for field, messages in self.errors.items()
            )
            raise ConfigurationError(f'Некоректна конфігурація: {problems}')
        data = self.cleaned_data
        bpcode = getattr(settings, 'BPCODE', {})
        scale = 'PAPER' if data['paper_scale'] else 'DESK'
        scaled = {
            'runs': bpcode.get(f'{scale}_RUNS', 100 if data['paper_scale'] else 20),
            'restarts': bpcode.get(f'{scale}_RESTARTS', 30 if data['paper_scale'] else 10),
            'messages': bpcode.get(f'{scale}_MESSAGES', 50 if data['paper_scale'] else 10),
        }
        for name in scaled:
            if data.get(name) is not None:
                scaled[name] = data[name]
        betas = data.get('beta')
        if betas is None:
            lossy = ExperimentKind(data['kind']).task is Task.LC
            betas = tuple(bpcode.get('BETA_GRID', (1.0, 2.0, 4.0, 8.0))) if lossy else (1.0,)
        workers = data.get('workers')
        if workers is None:
            workers = bpcode.get('N_JOBS', 1)
        return ExperimentConfig(
            kind=ExperimentKind(data['kind']),
            seed=data['seed'],
            network=NetworkKind.parse(data['network']),
            K=data['K'],
            N=data['N'],
            rates=data['rates'],
            M=data.get('M'),
            p=data['p'],
            r=data['r'],
            bias=data['bias'],
            gammas=data['gamma'],
            betas=betas,
            k=data.get('k'),
            iterations=data.get('iters'),
            delta=data['delta'],
            out=data['out'],
            paper_scale=data['paper_scale'],
            workers=workers,
            record=data['record'],
            **scaled,
        )
