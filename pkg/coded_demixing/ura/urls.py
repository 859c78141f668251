from django.urls import path

from . import views

urlpatterns = [
    path('sweeps/', views.SweepsView.as_view()),
    path('sweeps/<int:pk>/', views.SweepDetailView.as_view()),
    path('thresholds/', views.ThresholdsView.as_view()),
    path('trials/', views.TrialView.as_view()),
]
