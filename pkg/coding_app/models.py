"""
Моделі даних для журналу експериментів
"""
from django.db import models


class ExperimentRun(models.Model):
    """Один запуск команди experiment"""
    KIND_CHOICES = [
        ('ecc-sweep', 'Крива декодування'),
        ('ecc-hist', 'Гістограма декодування'),
        ('lc-sweep', 'Крива стиснення'),
        ('lc-hist', 'Гістограма стиснення'),
        ('bounds', 'Теоретичні межі'),
    ]

    NETWORK_CHOICES = [
        ('pth', 'PTH'),
        ('cth', 'CTH'),
        ('cto', 'CTO'),
    ]

    STATUS_CHOICES = [
        ('completed', 'Завершено'),
        ('degraded', 'Забагато перерваних прогонів'),
    ]

    kind = models.CharField('Тип експерименту', max_length=20, choices=KIND_CHOICES)
    network = models.CharField('Мережа', max_length=3, choices=NETWORK_CHOICES)
    K = models.PositiveIntegerField('Приховані елементи K')
    N = models.PositiveIntegerField('Довжина повідомлення N')
    seed = models.BigIntegerField('Початкове зерно')
    config = models.JSONField('Конфігурація')
    version = models.CharField('Версія', max_length=100)
    status = models.CharField('Статус', max_length=20, choices=STATUS_CHOICES, default='completed')
    wall_time = models.FloatField('Тривалість, с', default=0.0)
    aborted = models.PositiveIntegerField('Перервано прогонів', default=0)
    output_paths = models.JSONField('Файли результатів', default=list)
    created_at = models.DateTimeField('Дата запуску', auto_now_add=True)

    class Meta:
        verbose_name = 'Запуск експерименту'
        verbose_name_plural = 'Запуски експериментів'
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.kind} {self.network.upper()} K={self.K} N={self.N} (seed {self.seed})"

    @property
    def total_results(self):
        """Кількість рядків результатів"""
        return self.results.count()


class ResultRecord(models.Model):
    """Агрегований показник однієї точки параметрів"""
    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='results', verbose_name='Запуск')
    params = models.JSONField('Параметри')
    metric = models.CharField('Показник', max_length=50)
    mean = models.FloatField('Середнє', null=True, blank=True)
    std = models.FloatField('Стандартне відхилення', default=0.0)
    count = models.PositiveIntegerField('Кількість прогонів')
    aborted = models.PositiveIntegerField('Перервано', default=0)
    wall_time = models.FloatField('Тривалість, с', default=0.0)

    class Meta:
        verbose_name = 'Результат'
        verbose_name_plural = 'Результати'
        ordering = ['run', 'id']

    def __str__(self):
        return f"{self.metric} = {self.mean}"
